#include "tello_arena/protocol.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace tello {

namespace {

std::vector<std::string_view> tokenize(std::string_view line)
{
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r' || line[i] == '\n'))
            ++i;
        std::size_t start = i;
        while (i < line.size() && !(line[i] == ' ' || line[i] == '\t' || line[i] == '\r' || line[i] == '\n'))
            ++i;
        if (i > start)
            tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

int parse_int(std::string_view token, const char* field)
{
    int value = 0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || token.empty())
        throw ProtocolError(ProtocolErrc::MalformedNumber, field, "'" + std::string(token) + "' is not an integer");
    return value;
}

void check_range(const char* field, int value, int lo, int hi)
{
    if (value < lo || value > hi) {
        throw ProtocolError(ProtocolErrc::OutOfRange, field,
                            std::to_string(value) + " not in [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
    }
}

void check_waypoint(const char* field, int x, int y, int z)
{
    check_range(field, x, -Limits::kMaxCoord, Limits::kMaxCoord);
    check_range(field, y, -Limits::kMaxCoord, Limits::kMaxCoord);
    check_range(field, z, -Limits::kMaxCoord, Limits::kMaxCoord);
    if (std::abs(x) < Limits::kMinWaypointNorm && std::abs(y) < Limits::kMinWaypointNorm &&
        std::abs(z) < Limits::kMinWaypointNorm) {
        throw ProtocolError(ProtocolErrc::OutOfRange, field, "waypoint too close, one of |x|,|y|,|z| must be >= 20");
    }
}

void expect_arity(const std::vector<std::string_view>& tokens, std::size_t args)
{
    if (tokens.size() != args + 1) {
        throw ProtocolError(ProtocolErrc::BadArity, std::string(tokens[0]),
                            "expected " + std::to_string(args) + " argument(s), got " +
                                std::to_string(tokens.size() - 1));
    }
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

const char* to_string(ProtocolErrc code)
{
    switch (code) {
    case ProtocolErrc::UnknownCommand: return "UnknownCommand";
    case ProtocolErrc::BadArity: return "BadArity";
    case ProtocolErrc::OutOfRange: return "OutOfRange";
    case ProtocolErrc::MalformedNumber: return "MalformedNumber";
    case ProtocolErrc::PayloadTypeMismatch: return "PayloadTypeMismatch";
    case ProtocolErrc::MissingExpectedQuery: return "MissingExpectedQuery";
    }
    return "?";
}

ProtocolError::ProtocolError(ProtocolErrc code, std::string field, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + (field.empty() ? "" : "(" + field + ")") + ": " + detail),
      code_(code), field_(std::move(field))
{
}

const char* keyword(MoveDir d)
{
    switch (d) {
    case MoveDir::Up: return "up";
    case MoveDir::Down: return "down";
    case MoveDir::Left: return "left";
    case MoveDir::Right: return "right";
    case MoveDir::Forward: return "forward";
    case MoveDir::Back: return "back";
    }
    return "?";
}

const char* keyword(RotateSense s) { return s == RotateSense::Cw ? "cw" : "ccw"; }

const char* keyword(FlipDir d)
{
    switch (d) {
    case FlipDir::L: return "l";
    case FlipDir::R: return "r";
    case FlipDir::F: return "f";
    case FlipDir::B: return "b";
    case FlipDir::FL: return "fl";
    case FlipDir::FR: return "fr";
    case FlipDir::BL: return "bl";
    case FlipDir::BR: return "br";
    }
    return "?";
}

const char* keyword(ReadQuery q)
{
    switch (q) {
    case ReadQuery::Speed: return "speed";
    case ReadQuery::Battery: return "battery";
    case ReadQuery::Time: return "time";
    case ReadQuery::Height: return "height";
    case ReadQuery::Temp: return "temp";
    case ReadQuery::Attitude: return "attitude";
    case ReadQuery::Baro: return "baro";
    case ReadQuery::Acceleration: return "acceleration";
    case ReadQuery::Tof: return "tof";
    case ReadQuery::Wifi: return "wifi";
    }
    return "?";
}

void validate(const Command& command)
{
    std::visit(overloaded{
                   [](const cmd::Move& m) {
                       check_range("distance", m.distance_cm, Limits::kMinDistance, Limits::kMaxDistance);
                   },
                   [](const cmd::Rotate& r) { check_range("angle", r.degrees, Limits::kMinAngle, Limits::kMaxAngle); },
                   [](const cmd::Go& g) {
                       check_waypoint("waypoint", g.x, g.y, g.z);
                       check_range("speed", g.speed, Limits::kMinSpeed, Limits::kMaxSpeed);
                   },
                   [](const cmd::Curve& c) {
                       check_waypoint("waypoint1", c.x1, c.y1, c.z1);
                       check_waypoint("waypoint2", c.x2, c.y2, c.z2);
                       check_range("speed", c.speed, Limits::kMinSpeed, Limits::kMaxSpeed);
                   },
                   [](const cmd::SetSpeed& s) { check_range("speed", s.speed, Limits::kMinSpeed, Limits::kMaxSpeed); },
                   [](const cmd::Rc& rc) {
                       check_range("lr", rc.lr, -Limits::kMaxRc, Limits::kMaxRc);
                       check_range("fb", rc.fb, -Limits::kMaxRc, Limits::kMaxRc);
                       check_range("ud", rc.ud, -Limits::kMaxRc, Limits::kMaxRc);
                       check_range("yaw", rc.yaw, -Limits::kMaxRc, Limits::kMaxRc);
                   },
                   [](const cmd::Wifi& w) {
                       auto bad = [](const std::string& s) {
                           return s.empty() || s.find_first_of(" \t\r\n") != std::string::npos;
                       };
                       if (bad(w.ssid) || bad(w.pass))
                           throw ProtocolError(ProtocolErrc::OutOfRange, "wifi", "ssid/pass must be single tokens");
                   },
                   [](const auto&) {},
               },
               command);
}

Command parse_command(std::string_view line)
{
    const auto tokens = tokenize(line);
    if (tokens.empty())
        throw ProtocolError(ProtocolErrc::UnknownCommand, "", "empty line");
    const std::string_view head = tokens[0];

    auto no_args = [&](Command c) {
        expect_arity(tokens, 0);
        return c;
    };
    auto arg = [&](std::size_t i, const char* field) { return parse_int(tokens[i], field); };

    Command result;
    if (head == "command") {
        result = no_args(cmd::ModeEnter{});
    } else if (head == "takeoff") {
        result = no_args(cmd::TakeOff{});
    } else if (head == "land") {
        result = no_args(cmd::Land{});
    } else if (head == "streamon") {
        result = no_args(cmd::StreamOn{});
    } else if (head == "streamoff") {
        result = no_args(cmd::StreamOff{});
    } else if (head == "emergency") {
        result = no_args(cmd::Emergency{});
    } else if (head == "up" || head == "down" || head == "left" || head == "right" || head == "forward" ||
               head == "back") {
        expect_arity(tokens, 1);
        MoveDir dir = head == "up"     ? MoveDir::Up
                      : head == "down" ? MoveDir::Down
                      : head == "left" ? MoveDir::Left
                      : head == "right" ? MoveDir::Right
                      : head == "forward" ? MoveDir::Forward
                                          : MoveDir::Back;
        result = cmd::Move{dir, arg(1, "distance")};
    } else if (head == "cw" || head == "ccw") {
        expect_arity(tokens, 1);
        result = cmd::Rotate{head == "cw" ? RotateSense::Cw : RotateSense::Ccw, arg(1, "angle")};
    } else if (head == "flip") {
        expect_arity(tokens, 1);
        static constexpr std::array<FlipDir, 8> dirs = {FlipDir::L,  FlipDir::R,  FlipDir::F,  FlipDir::B,
                                                        FlipDir::FL, FlipDir::FR, FlipDir::BL, FlipDir::BR};
        bool found = false;
        for (FlipDir d : dirs) {
            if (tokens[1] == keyword(d)) {
                result = cmd::Flip{d};
                found = true;
            }
        }
        if (!found)
            throw ProtocolError(ProtocolErrc::OutOfRange, "direction",
                                "'" + std::string(tokens[1]) + "' not in {l,r,f,b,fl,fr,bl,br}");
    } else if (head == "go") {
        expect_arity(tokens, 4);
        result = cmd::Go{arg(1, "x"), arg(2, "y"), arg(3, "z"), arg(4, "speed")};
    } else if (head == "curve") {
        expect_arity(tokens, 7);
        result = cmd::Curve{arg(1, "x1"), arg(2, "y1"), arg(3, "z1"), arg(4, "x2"),
                            arg(5, "y2"), arg(6, "z2"), arg(7, "speed")};
    } else if (head == "speed") {
        expect_arity(tokens, 1);
        result = cmd::SetSpeed{arg(1, "speed")};
    } else if (head == "rc") {
        expect_arity(tokens, 4);
        result = cmd::Rc{arg(1, "lr"), arg(2, "fb"), arg(3, "ud"), arg(4, "yaw")};
    } else if (head == "wifi") {
        expect_arity(tokens, 2);
        result = cmd::Wifi{std::string(tokens[1]), std::string(tokens[2])};
    } else if (head.size() > 1 && head.back() == '?') {
        const std::string_view name = head.substr(0, head.size() - 1);
        bool found = false;
        for (ReadQuery q : kAllQueries) {
            if (name == keyword(q)) {
                result = cmd::Read{q};
                found = true;
            }
        }
        if (!found)
            throw ProtocolError(ProtocolErrc::UnknownCommand, std::string(head), "unknown read query");
        expect_arity(tokens, 0);
    } else {
        throw ProtocolError(ProtocolErrc::UnknownCommand, std::string(head), "not a Tello SDK command");
    }
    validate(result);
    return result;
}

std::string serialize_command(const Command& command)
{
    auto join = [](std::initializer_list<int> values) {
        std::string out;
        for (int v : values) {
            out += ' ';
            out += std::to_string(v);
        }
        return out;
    };
    return std::visit(overloaded{
                          [](const cmd::ModeEnter&) -> std::string { return "command"; },
                          [](const cmd::TakeOff&) -> std::string { return "takeoff"; },
                          [](const cmd::Land&) -> std::string { return "land"; },
                          [](const cmd::StreamOn&) -> std::string { return "streamon"; },
                          [](const cmd::StreamOff&) -> std::string { return "streamoff"; },
                          [](const cmd::Emergency&) -> std::string { return "emergency"; },
                          [&](const cmd::Move& m) { return keyword(m.direction) + join({m.distance_cm}); },
                          [&](const cmd::Rotate& r) { return keyword(r.sense) + join({r.degrees}); },
                          [](const cmd::Flip& f) { return std::string("flip ") + keyword(f.direction); },
                          [&](const cmd::Go& g) { return "go" + join({g.x, g.y, g.z, g.speed}); },
                          [&](const cmd::Curve& c) {
                              return "curve" + join({c.x1, c.y1, c.z1, c.x2, c.y2, c.z2, c.speed});
                          },
                          [&](const cmd::SetSpeed& s) { return "speed" + join({s.speed}); },
                          [&](const cmd::Rc& rc) { return "rc" + join({rc.lr, rc.fb, rc.ud, rc.yaw}); },
                          [](const cmd::Wifi& w) { return "wifi " + w.ssid + " " + w.pass; },
                          [](const cmd::Read& r) { return std::string(keyword(r.query)) + "?"; },
                      },
                      command);
}

bool is_motion(const Command& command)
{
    return std::holds_alternative<cmd::TakeOff>(command) || std::holds_alternative<cmd::Land>(command) ||
           std::holds_alternative<cmd::Move>(command) || std::holds_alternative<cmd::Rotate>(command) ||
           std::holds_alternative<cmd::Flip>(command) || std::holds_alternative<cmd::Go>(command) ||
           std::holds_alternative<cmd::Curve>(command);
}

std::size_t payload_kind(ReadQuery q)
{
    switch (q) {
    case ReadQuery::Attitude:
    case ReadQuery::Acceleration: return 2;
    case ReadQuery::Baro: return 1;
    default: return 0;
    }
}

Response parse_response(std::string_view line, std::optional<ReadQuery> expected)
{
    const auto tokens = tokenize(line);
    if (!tokens.empty() && tokens[0] == "ok" && tokens.size() == 1)
        return resp::Ok{};
    if (!tokens.empty() && tokens[0] == "error") {
        std::string message;
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            if (i > 1)
                message += ' ';
            message += tokens[i];
        }
        return resp::Error{message};
    }
    if (!expected)
        throw ProtocolError(ProtocolErrc::MissingExpectedQuery, "", "value response '" + std::string(line) +
                                                                         "' without an expected query");
    const ReadQuery q = *expected;
    auto mismatch = [&]() {
        return ProtocolError(ProtocolErrc::PayloadTypeMismatch, keyword(q),
                             "cannot read '" + std::string(line) + "' as this query's result");
    };
    auto as_int = [&](std::string_view t) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || ptr != t.data() + t.size())
            throw mismatch();
        return v;
    };
    switch (payload_kind(q)) {
    case 0:
        if (tokens.size() != 1)
            throw mismatch();
        return resp::Value{q, as_int(tokens[0])};
    case 1: {
        if (tokens.size() != 1)
            throw mismatch();
        double v = 0;
        auto [ptr, ec] = std::from_chars(tokens[0].data(), tokens[0].data() + tokens[0].size(), v);
        if (ec != std::errc() || ptr != tokens[0].data() + tokens[0].size() || !std::isfinite(v))
            throw mismatch();
        return resp::Value{q, v};
    }
    default:
        if (tokens.size() != 3)
            throw mismatch();
        return resp::Value{q, Triple{as_int(tokens[0]), as_int(tokens[1]), as_int(tokens[2])}};
    }
}

std::string serialize_response(const Response& response)
{
    return std::visit(overloaded{
                          [](const resp::Ok&) -> std::string { return "ok"; },
                          [](const resp::Error& e) -> std::string {
                              return e.message.empty() ? "error" : "error " + e.message;
                          },
                          [](const resp::Value& v) -> std::string {
                              return std::visit(overloaded{
                                                    [](int i) { return std::to_string(i); },
                                                    [](double d) {
                                                        char buf[32];
                                                        std::snprintf(buf, sizeof buf, "%.2f", d);
                                                        return std::string(buf);
                                                    },
                                                    [](const Triple& t) {
                                                        return std::to_string(t[0]) + " " + std::to_string(t[1]) +
                                                               " " + std::to_string(t[2]);
                                                    },
                                                },
                                                v.payload);
                          },
                      },
                      response);
}

}  // namespace tello
