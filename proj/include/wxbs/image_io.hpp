#pragma once

#include "wxbs/image.hpp"

#include <string>

namespace wxbs {

// Reads PNG or PGM/PPM (8-bit). Color inputs are converted by channel
// averaging; intensities map to [0,1] by /255.
GrayImage loadImageGray(const std::string& path);

RgbImage loadImageRgb(const std::string& path);

void savePng(const std::string& path, const GrayImage& img);
void savePng(const std::string& path, const RgbImage& img);
void savePgm(const std::string& path, const GrayImage& img);

}  // namespace wxbs
