#include <gtest/gtest.h>

#include "support.hpp"
#include "tello_arena/protocol.hpp"

using namespace tello;
using tello::testing::Rng;

namespace {

ProtocolErrc error_of(std::string_view line)
{
    try {
        parse_command(line);
    } catch (const ProtocolError& e) {
        return e.code();
    }
    ADD_FAILURE() << "accepted: " << line;
    return ProtocolErrc::UnknownCommand;
}

}  // namespace

TEST(Protocol, ParsesEveryKeyword)
{
    EXPECT_EQ(parse_command("command"), Command{cmd::ModeEnter{}});
    EXPECT_EQ(parse_command("takeoff"), Command{cmd::TakeOff{}});
    EXPECT_EQ(parse_command("land"), Command{cmd::Land{}});
    EXPECT_EQ(parse_command("streamon"), Command{cmd::StreamOn{}});
    EXPECT_EQ(parse_command("streamoff"), Command{cmd::StreamOff{}});
    EXPECT_EQ(parse_command("emergency"), Command{cmd::Emergency{}});
    EXPECT_EQ(parse_command("forward 100"), Command(cmd::Move{MoveDir::Forward, 100}));
    EXPECT_EQ(parse_command("ccw 90"), Command(cmd::Rotate{RotateSense::Ccw, 90}));
    EXPECT_EQ(parse_command("flip bl"), Command(cmd::Flip{FlipDir::BL}));
    EXPECT_EQ(parse_command("go 100 0 -50 30"), Command(cmd::Go{100, 0, -50, 30}));
    EXPECT_EQ(parse_command("curve 20 20 0 40 0 0 20"), Command(cmd::Curve{20, 20, 0, 40, 0, 0, 20}));
    EXPECT_EQ(parse_command("speed 55"), Command(cmd::SetSpeed{55}));
    EXPECT_EQ(parse_command("rc -100 0 25 100"), Command(cmd::Rc{-100, 0, 25, 100}));
    EXPECT_EQ(parse_command("wifi net secret"), Command(cmd::Wifi{"net", "secret"}));
    EXPECT_EQ(parse_command("battery?"), Command(cmd::Read{ReadQuery::Battery}));
    EXPECT_EQ(parse_command("tof?"), Command(cmd::Read{ReadQuery::Tof}));
}

TEST(Protocol, ToleratesSurroundingWhitespace)
{
    EXPECT_EQ(parse_command("  up 20\r\n"), Command(cmd::Move{MoveDir::Up, 20}));
}

TEST(Protocol, LimitsAreInclusive)
{
    EXPECT_NO_THROW(parse_command("forward 20"));
    EXPECT_NO_THROW(parse_command("forward 500"));
    EXPECT_EQ(error_of("forward 19"), ProtocolErrc::OutOfRange);
    EXPECT_EQ(error_of("forward 501"), ProtocolErrc::OutOfRange);
    EXPECT_NO_THROW(parse_command("cw 360"));
    EXPECT_EQ(error_of("cw 0"), ProtocolErrc::OutOfRange);
    EXPECT_EQ(error_of("rc 101 0 0 0"), ProtocolErrc::OutOfRange);
    EXPECT_EQ(error_of("speed 9"), ProtocolErrc::OutOfRange);
}

TEST(Protocol, TypedErrors)
{
    EXPECT_EQ(error_of("hover"), ProtocolErrc::UnknownCommand);
    EXPECT_EQ(error_of(""), ProtocolErrc::UnknownCommand);
    EXPECT_EQ(error_of("foo?"), ProtocolErrc::UnknownCommand);
    EXPECT_EQ(error_of("takeoff now"), ProtocolErrc::BadArity);
    EXPECT_EQ(error_of("go 100 0 0"), ProtocolErrc::BadArity);
    EXPECT_EQ(error_of("forward ten"), ProtocolErrc::MalformedNumber);
    EXPECT_EQ(error_of("forward 1.5"), ProtocolErrc::MalformedNumber);
    EXPECT_EQ(error_of("flip x"), ProtocolErrc::OutOfRange);
    EXPECT_EQ(error_of("go 10 10 10 50"), ProtocolErrc::OutOfRange);
}

TEST(Protocol, ErrorCarriesField)
{
    try {
        parse_command("rc 0 0 0 300");
        FAIL();
    } catch (const ProtocolError& e) {
        EXPECT_EQ(e.field(), "yaw");
    }
}

TEST(Protocol, RoundTripProperty)
{
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        const Command c = tello::testing::random_command(rng);
        const std::string text = serialize_command(c);
        ASSERT_EQ(parse_command(text), c) << text;
        ASSERT_EQ(serialize_command(parse_command(text)), text);
    }
}

TEST(Protocol, MutatedLinesAreRejected)
{
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const std::string line = tello::testing::mutate_invalid(rng);
        EXPECT_THROW(parse_command(line), ProtocolError) << line;
    }
}

TEST(Protocol, MotionSet)
{
    EXPECT_TRUE(is_motion(cmd::TakeOff{}));
    EXPECT_TRUE(is_motion(cmd::Curve{20, 20, 0, 40, 0, 0, 20}));
    EXPECT_FALSE(is_motion(cmd::Rc{0, 0, 0, 0}));
    EXPECT_FALSE(is_motion(cmd::Read{ReadQuery::Battery}));
    EXPECT_FALSE(is_motion(cmd::ModeEnter{}));
}

TEST(Protocol, Responses)
{
    EXPECT_EQ(parse_response("ok", std::nullopt), Response{resp::Ok{}});
    EXPECT_EQ(parse_response("error not flying", std::nullopt), Response(resp::Error{"not flying"}));
    EXPECT_EQ(parse_response("87", ReadQuery::Battery), Response(resp::Value{ReadQuery::Battery, 87}));
    EXPECT_EQ(parse_response("0 -3 270", ReadQuery::Attitude),
              Response(resp::Value{ReadQuery::Attitude, Triple{0, -3, 270}}));
    EXPECT_EQ(parse_response("1.25", ReadQuery::Baro), Response(resp::Value{ReadQuery::Baro, 1.25}));
}

TEST(Protocol, ResponseErrors)
{
    auto code = [](std::string_view line, std::optional<ReadQuery> q) {
        try {
            parse_response(line, q);
        } catch (const ProtocolError& e) {
            return e.code();
        }
        return ProtocolErrc::UnknownCommand;
    };
    EXPECT_EQ(code("87", std::nullopt), ProtocolErrc::MissingExpectedQuery);
    EXPECT_EQ(code("1 2 3", ReadQuery::Battery), ProtocolErrc::PayloadTypeMismatch);
    EXPECT_EQ(code("87", ReadQuery::Attitude), ProtocolErrc::PayloadTypeMismatch);
    EXPECT_EQ(code("high", ReadQuery::Height), ProtocolErrc::PayloadTypeMismatch);
}

TEST(Protocol, ResponseRoundTrip)
{
    for (ReadQuery q : kAllQueries) {
        Payload p;
        switch (payload_kind(q)) {
        case 0: p = 42; break;
        case 1: p = 0.75; break;
        default: p = Triple{1, -2, 3}; break;
        }
        const Response r = resp::Value{q, p};
        EXPECT_EQ(parse_response(serialize_response(r), q), r) << keyword(q);
    }
}
