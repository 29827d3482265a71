#include "reefforge/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <string>

#include "reefforge/errors.hpp"

namespace reefforge {

namespace {

struct ReadCursor {
  const uint8_t* data;
  size_t size;
  size_t pos;
};

void mem_read(png_structp png, png_bytep out, png_size_t n) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cur->pos + n > cur->size) png_error(png, "read past end of buffer");
  std::memcpy(out, cur->data + cur->pos, n);
  cur->pos += n;
}

void mem_write(png_structp png, png_bytep data, png_size_t n) {
  auto* out = static_cast<std::vector<uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + n);
}

void mem_flush(png_structp) {}

// libpng error handling: record the message, longjmp back to the operation,
// throw from there. Never throw across libpng's C frames.
void on_png_error(png_structp png, png_const_charp msg) {
  auto* err = static_cast<std::string*>(png_get_error_ptr(png));
  if (err) *err = msg ? msg : "unknown error";
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

class Writer {
 public:
  explicit Writer(std::string* err) {
    png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, err, on_png_error, on_png_warning);
    if (!png_) throw IoError("png: cannot allocate write struct");
    info_ = png_create_info_struct(png_);
    if (!info_) {
      png_destroy_write_struct(&png_, nullptr);
      throw IoError("png: cannot allocate info struct");
    }
  }
  ~Writer() { png_destroy_write_struct(&png_, &info_); }
  png_structp png() { return png_; }
  png_infop info() { return info_; }

 private:
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

class Reader {
 public:
  explicit Reader(std::string* err) {
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, err, on_png_error, on_png_warning);
    if (!png_) throw IoError("png: cannot allocate read struct");
    info_ = png_create_info_struct(png_);
    if (!info_) {
      png_destroy_read_struct(&png_, nullptr, nullptr);
      throw IoError("png: cannot allocate info struct");
    }
  }
  ~Reader() { png_destroy_read_struct(&png_, &info_, nullptr); }
  png_structp png() { return png_; }
  png_infop info() { return info_; }

 private:
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

constexpr int kCompressionLevel = 6;

void check_signature(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
    throw ProtocolError("png: not a PNG stream");
}

}  // namespace

std::vector<uint8_t> encode_png(const ImageGray16& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.data.size() != static_cast<size_t>(img.width) * img.height)
    throw ValidationError("encode_png: malformed gray16 image");

  std::vector<uint8_t> out;
  std::string errmsg;
  Writer w(&errmsg);
  // file format is big-endian 16-bit; rows serialized explicitly
  std::vector<uint8_t> row(static_cast<size_t>(img.width) * 2);

  if (setjmp(png_jmpbuf(w.png()))) throw IoError("png: " + errmsg);

  png_set_write_fn(w.png(), &out, mem_write, mem_flush);
  png_set_compression_level(w.png(), kCompressionLevel);
  png_set_IHDR(w.png(), w.info(), static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png(), w.info());
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      uint16_t v = img.data[static_cast<size_t>(y) * img.width + x];
      row[static_cast<size_t>(x) * 2] = static_cast<uint8_t>(v >> 8);
      row[static_cast<size_t>(x) * 2 + 1] = static_cast<uint8_t>(v & 0xFF);
    }
    png_write_row(w.png(), row.data());
  }
  png_write_end(w.png(), w.info());
  return out;
}

std::vector<uint8_t> encode_png(const ImageRGB8& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.data.size() != static_cast<size_t>(img.width) * img.height * 3)
    throw ValidationError("encode_png: malformed rgb8 image");

  std::vector<uint8_t> out;
  std::string errmsg;
  Writer w(&errmsg);

  if (setjmp(png_jmpbuf(w.png()))) throw IoError("png: " + errmsg);

  png_set_write_fn(w.png(), &out, mem_write, mem_flush);
  png_set_compression_level(w.png(), kCompressionLevel);
  png_set_IHDR(w.png(), w.info(), static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png(), w.info());
  for (int y = 0; y < img.height; ++y)
    png_write_row(w.png(),
                  const_cast<png_bytep>(&img.data[static_cast<size_t>(y) * img.width * 3]));
  png_write_end(w.png(), w.info());
  return out;
}

PngInfo probe_png(const std::vector<uint8_t>& bytes) {
  check_signature(bytes);
  std::string errmsg;
  Reader r(&errmsg);
  ReadCursor cur{bytes.data(), bytes.size(), 0};
  PngInfo info;

  if (setjmp(png_jmpbuf(r.png()))) throw ProtocolError("png: " + errmsg);

  png_set_read_fn(r.png(), &cur, mem_read);
  png_read_info(r.png(), r.info());
  info.width = static_cast<int>(png_get_image_width(r.png(), r.info()));
  info.height = static_cast<int>(png_get_image_height(r.png(), r.info()));
  info.bit_depth = png_get_bit_depth(r.png(), r.info());
  info.channels = png_get_channels(r.png(), r.info());
  return info;
}

ImageGray16 decode_png_gray16(const std::vector<uint8_t>& bytes) {
  PngInfo info = probe_png(bytes);
  if (info.channels != 1 || info.bit_depth != 16)
    throw ProtocolError("png: expected 16-bit grayscale");

  ImageGray16 img;
  img.width = info.width;
  img.height = info.height;
  img.data.resize(static_cast<size_t>(img.width) * img.height);

  std::string errmsg;
  Reader r(&errmsg);
  ReadCursor cur{bytes.data(), bytes.size(), 0};
  std::vector<uint8_t> row(static_cast<size_t>(img.width) * 2);

  if (setjmp(png_jmpbuf(r.png()))) throw ProtocolError("png: " + errmsg);

  png_set_read_fn(r.png(), &cur, mem_read);
  png_read_info(r.png(), r.info());
  for (int y = 0; y < img.height; ++y) {
    png_read_row(r.png(), row.data(), nullptr);
    for (int x = 0; x < img.width; ++x)
      img.data[static_cast<size_t>(y) * img.width + x] = static_cast<uint16_t>(
          (row[static_cast<size_t>(x) * 2] << 8) | row[static_cast<size_t>(x) * 2 + 1]);
  }
  png_read_end(r.png(), nullptr);
  return img;
}

ImageRGB8 decode_png_rgb8(const std::vector<uint8_t>& bytes) {
  PngInfo info = probe_png(bytes);
  if (info.channels != 3 || info.bit_depth != 8)
    throw ProtocolError("png: expected 8-bit RGB");

  ImageRGB8 img;
  img.width = info.width;
  img.height = info.height;
  img.data.resize(static_cast<size_t>(img.width) * img.height * 3);

  std::string errmsg;
  Reader r(&errmsg);
  ReadCursor cur{bytes.data(), bytes.size(), 0};

  if (setjmp(png_jmpbuf(r.png()))) throw ProtocolError("png: " + errmsg);

  png_set_read_fn(r.png(), &cur, mem_read);
  png_read_info(r.png(), r.info());
  for (int y = 0; y < img.height; ++y)
    png_read_row(r.png(), &img.data[static_cast<size_t>(y) * img.width * 3], nullptr);
  png_read_end(r.png(), nullptr);
  return img;
}

}  // namespace reefforge
