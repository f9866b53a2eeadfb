#include "tello_arena/tfrm.hpp"

#include <cstring>
#include <istream>

namespace tello {

namespace {

constexpr char kMagic[4] = {'T', 'F', 'R', 'M'};

void put_be(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes)
{
    for (int i = bytes - 1; i >= 0; --i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_be(const std::uint8_t* p, int bytes)
{
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i)
        v = (v << 8) | p[i];
    return v;
}

}  // namespace

TfrmError::TfrmError(TfrmErrc code, const std::string& detail) : std::runtime_error(detail), code_(code) {}

std::vector<std::uint8_t> encode_frame(const VideoFrame& frame)
{
    const Frame& img = frame.image;
    if (img.width() > 0xFFFF || img.height() > 0xFFFF)
        throw TfrmError(TfrmErrc::BadSize, "frame too large for TFRM");
    std::vector<std::uint8_t> out;
    out.reserve(kTfrmHeaderSize + img.bytes().size());
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_be(out, frame.seq, 4);
    put_be(out, frame.t_ms, 8);
    put_be(out, static_cast<std::uint64_t>(img.width()), 2);
    put_be(out, static_cast<std::uint64_t>(img.height()), 2);
    out.insert(out.end(), img.bytes().begin(), img.bytes().end());
    return out;
}

TfrmHeader decode_header(const std::uint8_t* bytes)
{
    if (std::memcmp(bytes, kMagic, 4) != 0)
        throw TfrmError(TfrmErrc::BadMagic, "bad TFRM magic");
    TfrmHeader h;
    h.seq = static_cast<std::uint32_t>(get_be(bytes + 4, 4));
    h.t_ms = get_be(bytes + 8, 8);
    h.width = static_cast<std::uint16_t>(get_be(bytes + 16, 2));
    h.height = static_cast<std::uint16_t>(get_be(bytes + 18, 2));
    return h;
}

std::optional<VideoFrame> read_frame(std::istream& in)
{
    std::uint8_t header[kTfrmHeaderSize];
    in.read(reinterpret_cast<char*>(header), kTfrmHeaderSize);
    if (in.gcount() == 0)
        return std::nullopt;
    if (static_cast<std::size_t>(in.gcount()) < 4 || std::memcmp(header, kMagic, 4) != 0)
        throw TfrmError(TfrmErrc::BadMagic, "bad TFRM magic");
    if (static_cast<std::size_t>(in.gcount()) < kTfrmHeaderSize)
        throw TfrmError(TfrmErrc::Truncated, "truncated TFRM header");
    const TfrmHeader h = decode_header(header);
    VideoFrame f;
    f.seq = h.seq;
    f.t_ms = h.t_ms;
    f.image = Frame(h.width, h.height);
    auto px = f.image.bytes();
    in.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()));
    if (static_cast<std::size_t>(in.gcount()) < px.size())
        throw TfrmError(TfrmErrc::Truncated, "truncated TFRM payload");
    return f;
}

TfrmFile read_tfrm_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    TfrmFile file;
    try {
        while (auto f = read_frame(in))
            file.frames.push_back(std::move(*f));
    } catch (const TfrmError& e) {
        if (e.code() != TfrmErrc::Truncated)
            throw;
        file.truncated = true;
    }
    return file;
}

VideoRecorder::VideoRecorder(std::filesystem::path directory) : directory_(std::move(directory)) {}

MissionEvent VideoRecorder::start(double t, const std::string& trigger)
{
    if (!connected_)
        throw Error(Errc::StreamNotConnected, "video stream not connected");
    if (recording()) {
        MissionEvent w = claim(t, EventKind::Warning);
        w.detail = "recording already started";
        return w;
    }
    std::filesystem::create_directories(directory_);
    path_ = directory_ / ("recording_" + std::to_string(sequence_++) + ".tfrm");
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_)
        throw std::runtime_error("cannot write " + path_.string());
    frames_ = 0;
    MissionEvent e = claim(t, EventKind::RecordingStarted);
    e.detail = trigger;
    return e;
}

void VideoRecorder::append(const VideoFrame& frame)
{
    if (!recording())
        return;
    const auto bytes = encode_frame(frame);
    out_.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    ++frames_;
}

MissionEvent VideoRecorder::stop(double t, const std::string& trigger)
{
    if (!recording())
        throw Error(Errc::NotRecording, "stop without start");
    out_.close();
    MissionEvent e = claim(t, EventKind::RecordingStopped);
    e.index = static_cast<int>(frames_);
    e.detail = trigger;
    return e;
}

}  // namespace tello
