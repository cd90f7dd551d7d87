#include "core/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

#include "core/errors.hpp"

namespace sess {

namespace {

enum class RasterFormat { Png, Pnm };

RasterFormat format_from_path(const std::string& path) {
    const auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    for (char& c : ext) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (ext == "png") {
        return RasterFormat::Png;
    }
    if (ext == "ppm" || ext == "pgm" || ext == "pnm") {
        return RasterFormat::Pnm;
    }
    throw FormatError("unsupported raster extension: " + path);
}

void require_readable(const std::string& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec) || ec) {
        throw IoError("no such file: " + path);
    }
    if (std::filesystem::is_directory(path, ec)) {
        throw IoError("path is a directory: " + path);
    }
}

struct Raster8 {
    int width = 0;
    int height = 0;
    int channels = 0;  // 1 or 3
    std::vector<std::uint8_t> data;
};

Raster8 decode_png(const std::string& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw FormatError("cannot decode PNG " + path + ": " + msg);
    }
    Raster8 out;
    out.width = static_cast<int>(image.width);
    out.height = static_cast<int>(image.height);
    const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0 &&
                      (image.format & PNG_FORMAT_FLAG_COLORMAP) == 0;
    out.channels = gray ? 1 : 3;
    image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    out.data.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.data.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw FormatError("cannot decode PNG " + path + ": " + msg);
    }
    return out;
}

// Minimal binary/ASCII PNM reader (P2/P3/P5/P6, maxval <= 255).
Raster8 decode_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    auto fail = [&path]() -> Raster8 { throw FormatError("corrupt PNM file: " + path); };

    std::string magic;
    in >> magic;
    const bool ascii = magic == "P2" || magic == "P3";
    const bool binary = magic == "P5" || magic == "P6";
    if (!ascii && !binary) {
        return fail();
    }
    const int channels = (magic == "P3" || magic == "P6") ? 3 : 1;

    auto next_token = [&]() -> long {
        // Skips whitespace and '#' comment lines.
        while (true) {
            const int c = in.peek();
            if (c == '#') {
                std::string line;
                std::getline(in, line);
            } else if (std::isspace(c)) {
                in.get();
            } else {
                break;
            }
        }
        long v = -1;
        in >> v;
        return in ? v : -1;
    };

    const long width = next_token();
    const long height = next_token();
    const long maxval = next_token();
    if (width < 1 || height < 1 || maxval < 1) {
        return fail();
    }
    if (maxval > 255) {
        throw FormatError("unsupported PNM maxval " + std::to_string(maxval) + ": " + path);
    }

    Raster8 out;
    out.width = static_cast<int>(width);
    out.height = static_cast<int>(height);
    out.channels = channels;
    const std::size_t count = static_cast<std::size_t>(width) * height * channels;
    out.data.resize(count);
    if (binary) {
        in.get();  // single whitespace after maxval
        if (!in.read(reinterpret_cast<char*>(out.data.data()), static_cast<std::streamsize>(count))) {
            return fail();
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const long v = next_token();
            if (v < 0 || v > maxval) {
                return fail();
            }
            out.data[i] = static_cast<std::uint8_t>(v);
        }
    }
    if (maxval != 255) {
        for (auto& v : out.data) {
            v = static_cast<std::uint8_t>(std::lround(v * 255.0 / static_cast<double>(maxval)));
        }
    }
    return out;
}

Raster8 decode(const std::string& path) {
    const RasterFormat fmt = format_from_path(path);
    require_readable(path);
    return fmt == RasterFormat::Png ? decode_png(path) : decode_pnm(path);
}

void encode_png_gray8(const std::uint8_t* data, int width, int height, const std::string& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, data, 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw IoError("cannot write PNG " + path + ": " + msg);
    }
}

void encode_png_rgb8(const std::uint8_t* data, int width, int height, const std::string& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.c_str(), 0, data, 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw IoError("cannot write PNG " + path + ": " + msg);
    }
}

// 16-bit grayscale needs the low-level API; the simplified one only writes
// linear (gamma-tagged) 16-bit rasters.
void encode_png_gray16(const std::vector<std::uint16_t>& data, int width, int height,
                       const std::string& path) {
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!fp) {
        throw IoError("cannot open for writing: " + path);
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng write-struct allocation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("cannot write PNG " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 16,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_set_swap(png);  // data is host little-endian; PNG wants big-endian
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) {
        rows[y] = reinterpret_cast<png_bytep>(
            const_cast<std::uint16_t*>(data.data() + static_cast<std::size_t>(y) * width));
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void write_pnm(const std::uint8_t* data, int width, int height, int channels,
               const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out << (channels == 3 ? "P6" : "P5") << "\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(data),
              static_cast<std::streamsize>(static_cast<std::size_t>(width) * height * channels));
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

std::uint8_t quantize(double v) {
    const long q = std::lround(v * 255.0);
    return static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
}

}  // namespace

RgbImage load_image(const std::string& path) {
    const Raster8 raw = decode(path);
    RgbImage img(raw.width, raw.height);
    if (raw.channels == 3) {
        img.data = raw.data;
    } else {
        for (std::size_t p = 0; p < img.pixels(); ++p) {
            img.data[p * 3 + 0] = raw.data[p];
            img.data[p * 3 + 1] = raw.data[p];
            img.data[p * 3 + 2] = raw.data[p];
        }
    }
    return img;
}

SaliencyMap load_saliency(const std::string& path) {
    const Raster8 raw = decode(path);
    SaliencyMap map(raw.width, raw.height);
    if (raw.channels == 1) {
        for (std::size_t p = 0; p < map.pixels(); ++p) {
            map.data[p] = raw.data[p] / 255.0;
        }
    } else {
        for (std::size_t p = 0; p < map.pixels(); ++p) {
            const std::uint8_t r = raw.data[p * 3 + 0];
            const std::uint8_t g = raw.data[p * 3 + 1];
            const std::uint8_t b = raw.data[p * 3 + 2];
            if (r != g || g != b) {
                throw FormatError("saliency map has unequal RGB channels: " + path);
            }
            map.data[p] = r / 255.0;
        }
    }
    return map;
}

void save_map(const SaliencyMap& map, const std::string& path) {
    std::vector<std::uint8_t> bytes(map.pixels());
    for (std::size_t p = 0; p < map.pixels(); ++p) {
        bytes[p] = quantize(map.data[p]);
    }
    if (format_from_path(path) == RasterFormat::Png) {
        encode_png_gray8(bytes.data(), map.width, map.height, path);
    } else {
        write_pnm(bytes.data(), map.width, map.height, 1, path);
    }
}

void save_image(const RgbImage& img, const std::string& path) {
    if (format_from_path(path) == RasterFormat::Png) {
        encode_png_rgb8(img.data.data(), img.width, img.height, path);
    } else {
        write_pnm(img.data.data(), img.width, img.height, 3, path);
    }
}

void save_labels(const Segmentation& seg, const std::string& path) {
    std::vector<std::uint16_t> raw(seg.labels.size());
    for (std::size_t i = 0; i < seg.labels.size(); ++i) {
        raw[i] = static_cast<std::uint16_t>(seg.labels[i]);
    }
    encode_png_gray16(raw, seg.width, seg.height, path);
}

void save_boundary_overlay(const RgbImage& img, const Segmentation& seg, const std::string& path) {
    if (img.width != seg.width || img.height != seg.height) {
        throw DimensionError("boundary overlay: image and segmentation sizes differ");
    }
    RgbImage out = img;
    for (int y = 0; y < seg.height; ++y) {
        for (int x = 0; x < seg.width; ++x) {
            const std::int32_t label = seg.labels[static_cast<std::size_t>(y) * seg.width + x];
            const bool edge =
                (x + 1 < seg.width && seg.labels[static_cast<std::size_t>(y) * seg.width + x + 1] != label) ||
                (y + 1 < seg.height &&
                 seg.labels[(static_cast<std::size_t>(y) + 1) * seg.width + x] != label);
            if (edge) {
                std::uint8_t* px = out.at(x, y);
                px[0] = 255;
                px[1] = 0;
                px[2] = 0;
            }
        }
    }
    save_image(out, path);
}

}  // namespace sess
