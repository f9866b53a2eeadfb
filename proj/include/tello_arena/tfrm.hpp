#pragma once

// TFRM video framing: big-endian header ("TFRM", seq u32, t_ms u64, width u16,
// height u16) followed by width*height*3 RGB bytes.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tello_arena/events.hpp"
#include "tello_arena/image.hpp"

namespace tello {

inline constexpr std::size_t kTfrmHeaderSize = 20;

struct VideoFrame {
    std::uint32_t seq = 0;
    std::uint64_t t_ms = 0;
    Frame image;
};

enum class TfrmErrc { BadMagic, Truncated, BadSize };

class TfrmError : public std::runtime_error {
public:
    TfrmError(TfrmErrc code, const std::string& detail);
    TfrmErrc code() const noexcept { return code_; }

private:
    TfrmErrc code_;
};

std::vector<std::uint8_t> encode_frame(const VideoFrame& frame);

struct TfrmHeader {
    std::uint32_t seq = 0;
    std::uint64_t t_ms = 0;
    std::uint16_t width = 0;
    std::uint16_t height = 0;
};
TfrmHeader decode_header(const std::uint8_t* bytes);

/// Reads the next record; nullopt at a clean end of stream.
std::optional<VideoFrame> read_frame(std::istream& in);

struct TfrmFile {
    std::vector<VideoFrame> frames;
    bool truncated = false;  // the last record was cut short and dropped
};
/// Reads every record; a bad magic throws, a short tail sets truncated.
TfrmFile read_tfrm_file(const std::filesystem::path& path);

/// Appends TFRM records to a file between a start and a stop trigger.
class VideoRecorder {
public:
    enum class Errc { StreamNotConnected, NotRecording };
    class Error : public std::runtime_error {
    public:
        Error(Errc code, const std::string& detail) : std::runtime_error(detail), code_(code) {}
        Errc code() const noexcept { return code_; }

    private:
        Errc code_;
    };

    explicit VideoRecorder(std::filesystem::path directory);

    void set_stream_connected(bool connected) { connected_ = connected; }
    bool recording() const { return out_.is_open(); }
    std::size_t frames() const { return frames_; }
    const std::filesystem::path& path() const { return path_; }

    /// Opens a new recording; a second start while recording is ignored with a Warning event.
    MissionEvent start(double t, const std::string& trigger);
    /// Appends a frame when recording.
    void append(const VideoFrame& frame);
    /// Finalizes the file; throws NotRecording without a prior start.
    MissionEvent stop(double t, const std::string& trigger);

private:
    std::filesystem::path directory_;
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t frames_ = 0;
    int sequence_ = 0;
    bool connected_ = true;
};

}  // namespace tello
