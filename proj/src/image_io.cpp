#include "wxbs/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <vector>

namespace wxbs {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

RgbImage readPng(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) {
        throw std::runtime_error("cannot open image: " + path);
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("failed to decode PNG: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));

    std::vector<png_byte> raw(static_cast<size_t>(width) * height * 3);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) {
        rows[y] = raw.data() + static_cast<size_t>(y) * width * 3;
    }
    png_read_image(png, rows.data());
    png_destroy_read_struct(&png, &info, nullptr);

    RgbImage img;
    img.width = width;
    img.height = height;
    img.pixels.resize(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
        img.pixels[i] = raw[i] / 255.0f;
    }
    return img;
}

int pnmReadValue(std::istream& in) {
    // Skips whitespace and '#' comments between tokens.
    for (;;) {
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
    int v = 0;
    if (!(in >> v)) {
        throw std::runtime_error("malformed PNM header");
    }
    return v;
}

RgbImage readPnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open image: " + path);
    }
    char magic[2];
    in.read(magic, 2);
    if (magic[0] != 'P' || (magic[1] < '2' || magic[1] > '6')) {
        throw std::runtime_error("unsupported PNM format: " + path);
    }
    const bool color = magic[1] == '3' || magic[1] == '6';
    const bool binary = magic[1] == '5' || magic[1] == '6';

    const int width = pnmReadValue(in);
    const int height = pnmReadValue(in);
    const int maxval = pnmReadValue(in);
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255) {
        throw std::runtime_error("unsupported PNM dimensions: " + path);
    }

    const size_t samples = static_cast<size_t>(width) * height * (color ? 3 : 1);
    std::vector<unsigned char> raw(samples);
    if (binary) {
        in.get();  // single whitespace after maxval
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(samples));
        if (static_cast<size_t>(in.gcount()) != samples) {
            throw std::runtime_error("truncated PNM data: " + path);
        }
    } else {
        for (size_t i = 0; i < samples; ++i) {
            raw[i] = static_cast<unsigned char>(pnmReadValue(in));
        }
    }

    RgbImage img;
    img.width = width;
    img.height = height;
    img.pixels.resize(static_cast<size_t>(width) * height * 3);
    for (size_t i = 0; i < static_cast<size_t>(width) * height; ++i) {
        if (color) {
            img.pixels[3 * i] = raw[3 * i] / static_cast<float>(maxval);
            img.pixels[3 * i + 1] = raw[3 * i + 1] / static_cast<float>(maxval);
            img.pixels[3 * i + 2] = raw[3 * i + 2] / static_cast<float>(maxval);
        } else {
            const float v = raw[i] / static_cast<float>(maxval);
            img.pixels[3 * i] = img.pixels[3 * i + 1] = img.pixels[3 * i + 2] = v;
        }
    }
    return img;
}

bool hasPngMagic(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    unsigned char sig[8] = {};
    in.read(reinterpret_cast<char*>(sig), 8);
    static const unsigned char kPng[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    return in.gcount() == 8 && std::memcmp(sig, kPng, 8) == 0;
}

void writePng(const std::string& path, const unsigned char* data, int width, int height,
              int channels) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) {
        throw std::runtime_error("cannot write image: " + path);
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("failed to encode PNG: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, width, height, 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) {
        rows[y] = const_cast<png_bytep>(data + static_cast<size_t>(y) * width * channels);
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

unsigned char toByte(float v) {
    const float scaled = v * 255.0f + 0.5f;
    return static_cast<unsigned char>(scaled < 0.0f ? 0.0f : (scaled > 255.0f ? 255.0f : scaled));
}

}  // namespace

RgbImage loadImageRgb(const std::string& path) {
    if (hasPngMagic(path)) {
        return readPng(path);
    }
    return readPnm(path);
}

GrayImage loadImageGray(const std::string& path) {
    return toGray(loadImageRgb(path));
}

void savePng(const std::string& path, const GrayImage& img) {
    std::vector<unsigned char> bytes(img.pixels.size());
    for (size_t i = 0; i < img.pixels.size(); ++i) bytes[i] = toByte(img.pixels[i]);
    writePng(path, bytes.data(), img.width, img.height, 1);
}

void savePng(const std::string& path, const RgbImage& img) {
    std::vector<unsigned char> bytes(img.pixels.size());
    for (size_t i = 0; i < img.pixels.size(); ++i) bytes[i] = toByte(img.pixels[i]);
    writePng(path, bytes.data(), img.width, img.height, 3);
}

void savePgm(const std::string& path, const GrayImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write image: " + path);
    }
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    for (float v : img.pixels) {
        out.put(static_cast<char>(toByte(v)));
    }
}

}  // namespace wxbs
