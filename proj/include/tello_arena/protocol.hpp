#pragma once

// Tello SDK 1.3 text protocol: commands, read queries and responses.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace tello {

enum class ProtocolErrc {
    UnknownCommand,
    BadArity,
    OutOfRange,
    MalformedNumber,
    PayloadTypeMismatch,
    MissingExpectedQuery,
};

const char* to_string(ProtocolErrc code);

class ProtocolError : public std::runtime_error {
public:
    ProtocolError(ProtocolErrc code, std::string field, const std::string& detail);

    ProtocolErrc code() const noexcept { return code_; }
    const std::string& field() const noexcept { return field_; }

private:
    ProtocolErrc code_;
    std::string field_;
};

// Argument limits accepted by the drone.
struct Limits {
    static constexpr int kMinDistance = 20;
    static constexpr int kMaxDistance = 500;
    static constexpr int kMinAngle = 1;
    static constexpr int kMaxAngle = 360;
    static constexpr int kMinSpeed = 10;
    static constexpr int kMaxSpeed = 100;
    static constexpr int kMaxRc = 100;
    static constexpr int kMaxCoord = 500;
    static constexpr int kMinWaypointNorm = 20;
};

enum class MoveDir { Up, Down, Left, Right, Forward, Back };
enum class RotateSense { Cw, Ccw };
enum class FlipDir { L, R, F, B, FL, FR, BL, BR };
enum class ReadQuery { Speed, Battery, Time, Height, Temp, Attitude, Baro, Acceleration, Tof, Wifi };

inline constexpr std::array<ReadQuery, 10> kAllQueries = {
    ReadQuery::Speed, ReadQuery::Battery, ReadQuery::Time,         ReadQuery::Height, ReadQuery::Temp,
    ReadQuery::Attitude, ReadQuery::Baro, ReadQuery::Acceleration, ReadQuery::Tof,    ReadQuery::Wifi};

const char* keyword(MoveDir d);
const char* keyword(RotateSense s);
const char* keyword(FlipDir d);
const char* keyword(ReadQuery q);  // without the trailing '?'

namespace cmd {
struct ModeEnter { bool operator==(const ModeEnter&) const = default; };
struct TakeOff { bool operator==(const TakeOff&) const = default; };
struct Land { bool operator==(const Land&) const = default; };
struct StreamOn { bool operator==(const StreamOn&) const = default; };
struct StreamOff { bool operator==(const StreamOff&) const = default; };
struct Emergency { bool operator==(const Emergency&) const = default; };
struct Move {
    MoveDir direction;
    int distance_cm;
    bool operator==(const Move&) const = default;
};
struct Rotate {
    RotateSense sense;
    int degrees;
    bool operator==(const Rotate&) const = default;
};
struct Flip {
    FlipDir direction;
    bool operator==(const Flip&) const = default;
};
struct Go {
    int x, y, z;
    int speed;
    bool operator==(const Go&) const = default;
};
struct Curve {
    int x1, y1, z1;
    int x2, y2, z2;
    int speed;
    bool operator==(const Curve&) const = default;
};
struct SetSpeed {
    int speed;
    bool operator==(const SetSpeed&) const = default;
};
struct Rc {
    int lr, fb, ud, yaw;
    bool operator==(const Rc&) const = default;
};
struct Wifi {
    std::string ssid;
    std::string pass;
    bool operator==(const Wifi&) const = default;
};
struct Read {
    ReadQuery query;
    bool operator==(const Read&) const = default;
};
}  // namespace cmd

using Command = std::variant<cmd::ModeEnter, cmd::TakeOff, cmd::Land, cmd::StreamOn, cmd::StreamOff, cmd::Emergency,
                             cmd::Move, cmd::Rotate, cmd::Flip, cmd::Go, cmd::Curve, cmd::SetSpeed, cmd::Rc, cmd::Wifi,
                             cmd::Read>;

/// Throws ProtocolError when a command violates its argument limits.
void validate(const Command& command);

Command parse_command(std::string_view line);
std::string serialize_command(const Command& command);

/// True for commands that move the drone and complete asynchronously.
bool is_motion(const Command& command);

using Triple = std::array<int, 3>;
using Payload = std::variant<int, double, Triple>;

namespace resp {
struct Ok { bool operator==(const Ok&) const = default; };
struct Error {
    std::string message;
    bool operator==(const Error&) const = default;
};
struct Value {
    ReadQuery query;
    Payload payload;
    bool operator==(const Value&) const = default;
};
}  // namespace resp

using Response = std::variant<resp::Ok, resp::Error, resp::Value>;

/// Shape of the payload a query answers with: 0 = int, 1 = double, 2 = triple.
std::size_t payload_kind(ReadQuery q);

Response parse_response(std::string_view line, std::optional<ReadQuery> expected);
std::string serialize_response(const Response& response);

}  // namespace tello
