#include "agesign/pnm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

namespace agesign {
namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Skips whitespace and '#' comments, then reads one decimal token.
  int next_int() {
    skip_separators();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw Error(Errc::malformed_header, "expected a decimal header field");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1L << 24)) throw Error(Errc::malformed_header, "header value too large");
      ++pos_;
    }
    return static_cast<int>(value);
  }

  void expect_single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(Errc::malformed_header, "missing whitespace before payload");
    }
    ++pos_;
  }

  std::size_t position() const { return pos_; }

 private:
  void skip_separators() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

std::vector<std::uint8_t> header(char kind, int width, int height) {
  const std::string text = std::string("P") + kind + "\n" + std::to_string(width) + " " +
                           std::to_string(height) + "\n255\n";
  return {text.begin(), text.end()};
}

}  // namespace

AnyImage read_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') {
    throw Error(Errc::malformed_header, "missing PNM magic");
  }
  const char kind = static_cast<char>(bytes[1]);
  if (kind != '5' && kind != '6') {
    throw Error(Errc::unsupported_format,
                std::string("only binary P5/P6 are supported, got P") + kind);
  }
  HeaderReader reader(bytes);
  const int width = reader.next_int();
  const int height = reader.next_int();
  const int maxval = reader.next_int();
  if (width < 1 || height < 1) throw Error(Errc::malformed_header, "zero image dimension");
  if (maxval != 255) {
    throw Error(Errc::unsupported_maxval, "maxval " + std::to_string(maxval) + " (need 255)");
  }
  reader.expect_single_whitespace();

  const std::size_t channels = kind == '6' ? 3 : 1;
  const std::size_t need = static_cast<std::size_t>(width) * height * channels;
  const std::size_t start = reader.position();
  if (bytes.size() - start < need) {
    throw Error(Errc::truncated_payload, "expected " + std::to_string(need) + " payload bytes");
  }
  const auto payload = bytes.subspan(start, need);
  if (channels == 1) {
    return GrayImage(width, height, std::vector<std::uint8_t>(payload.begin(), payload.end()));
  }
  std::vector<Rgb> pixels(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = Rgb{payload[3 * i], payload[3 * i + 1], payload[3 * i + 2]};
  }
  return ColorImage(width, height, std::move(pixels));
}

std::vector<std::uint8_t> write_pnm(const ColorImage& img) {
  auto out = header('6', img.width(), img.height());
  out.reserve(out.size() + img.size() * 3);
  for (const Rgb& p : img.pixels()) {
    out.push_back(p.r);
    out.push_back(p.g);
    out.push_back(p.b);
  }
  return out;
}

std::vector<std::uint8_t> write_pnm(const GrayImage& img) {
  auto out = header('5', img.width(), img.height());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_failure, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io_failure, "write failed for " + path.string());
}

AnyImage load_pnm(const std::filesystem::path& path) { return read_pnm(read_file(path)); }

ColorImage load_color(const std::filesystem::path& path) {
  auto image = load_pnm(path);
  if (auto* gray = std::get_if<GrayImage>(&image)) return to_color(*gray);
  return std::get<ColorImage>(std::move(image));
}

void save_pnm(const std::filesystem::path& path, const ColorImage& img) {
  write_file(path, write_pnm(img));
}

void save_pnm(const std::filesystem::path& path, const GrayImage& img) {
  write_file(path, write_pnm(img));
}

}  // namespace agesign
