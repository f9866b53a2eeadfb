#include "tello_arena/image.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <string>

namespace tello {

Frame::Frame(int width, int height, Rgb fill) : width_(width), height_(height)
{
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("frame dimensions must be positive");
    pixels_.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < pixels_.size(); i += 3) {
        pixels_[i] = fill.r;
        pixels_[i + 1] = fill.g;
        pixels_[i + 2] = fill.b;
    }
}

Mask::Mask(int width, int height, bool fill)
    : width_(width), height_(height), bits_(static_cast<std::size_t>(width) * height, fill ? 1 : 0)
{
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("mask dimensions must be positive");
}

std::size_t Mask::count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)); }

Mask Mask::complement() const
{
    Mask out = *this;
    for (auto& b : out.bits_)
        b = b ? 0 : 1;
    return out;
}

namespace {

void write_header(std::ofstream& out, const char* magic, int w, int h)
{
    out << magic << '\n' << w << ' ' << h << "\n255\n";
}

// Reads "P?\n<w> <h>\n255\n", skipping '#' comments.
void read_header(std::ifstream& in, const char* magic, int& w, int& h)
{
    auto next_token = [&]() {
        std::string tok;
        char c;
        while (in.get(c)) {
            if (c == '#') {
                std::string skip;
                std::getline(in, skip);
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!tok.empty())
                    break;
                continue;
            }
            tok += c;
        }
        return tok;
    };
    if (next_token() != magic)
        throw ImageIoError(std::string("expected ") + magic + " image");
    try {
        w = std::stoi(next_token());
        h = std::stoi(next_token());
        if (std::stoi(next_token()) != 255)
            throw ImageIoError("only 8-bit images are supported");
    } catch (const std::logic_error&) {
        throw ImageIoError("malformed image header");
    }
    if (w <= 0 || h <= 0)
        throw ImageIoError("bad image dimensions");
}

}  // namespace

void write_ppm(const std::filesystem::path& path, const Frame& frame)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ImageIoError("cannot open " + path.string());
    write_header(out, "P6", frame.width(), frame.height());
    out.write(reinterpret_cast<const char*>(frame.bytes().data()), static_cast<std::streamsize>(frame.bytes().size()));
}

Frame read_ppm(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ImageIoError("cannot open " + path.string());
    int w = 0, h = 0;
    read_header(in, "P6", w, h);
    Frame frame(w, h);
    in.read(reinterpret_cast<char*>(frame.bytes().data()), static_cast<std::streamsize>(frame.bytes().size()));
    if (in.gcount() != static_cast<std::streamsize>(frame.bytes().size()))
        throw ImageIoError("truncated PPM data");
    return frame;
}

void write_pgm(const std::filesystem::path& path, const Mask& mask)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ImageIoError("cannot open " + path.string());
    write_header(out, "P5", mask.width(), mask.height());
    for (auto b : mask.bits())
        out.put(b ? static_cast<char>(255) : 0);
}

Mask read_pgm(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ImageIoError("cannot open " + path.string());
    int w = 0, h = 0;
    read_header(in, "P5", w, h);
    Mask mask(w, h);
    std::vector<char> raw(mask.size());
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw ImageIoError("truncated PGM data");
    for (std::size_t i = 0; i < raw.size(); ++i)
        mask.bits()[i] = raw[i] != 0 ? 1 : 0;
    return mask;
}

}  // namespace tello
