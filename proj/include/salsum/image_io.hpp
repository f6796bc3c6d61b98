#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "salsum/error.hpp"
#include "salsum/image.hpp"

namespace salsum::io {

namespace fs = std::filesystem;

inline RgbImage rgb_from_mat(const cv::Mat& bgr) {
  RgbImage out(bgr.cols, bgr.rows);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) out(x, y) = Rgb{row[x][2], row[x][1], row[x][0]};
  }
  return out;
}

inline cv::Mat mat_from_rgb(const RgbImage& img) {
  cv::Mat bgr(img.height(), img.width(), CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.width(); ++x) {
      const Rgb p = img(x, y);
      row[x] = cv::Vec3b(p.b, p.g, p.r);
    }
  }
  return bgr;
}

inline RgbImage read_rgb(const fs::path& path) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw Error(ErrorCode::DecodeError, "ingestion", "cannot decode image " + path.string());
  return rgb_from_mat(bgr);
}

/// Reads an 8-bit single-channel image (PGM P5 or grayscale PNG) as raw levels.
inline Grid<std::uint8_t> read_gray8(const fs::path& path) {
  cv::Mat gray = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (gray.empty()) throw Error(ErrorCode::DecodeError, "ingestion", "cannot decode map " + path.string());
  Grid<std::uint8_t> out(gray.cols, gray.rows);
  for (int y = 0; y < gray.rows; ++y) {
    const auto* row = gray.ptr<std::uint8_t>(y);
    for (int x = 0; x < gray.cols; ++x) out(x, y) = row[x];
  }
  return out;
}

inline void write_rgb(const fs::path& path, const RgbImage& img) {
  if (!cv::imwrite(path.string(), mat_from_rgb(img)))
    throw Error(ErrorCode::IoError, "io", "cannot write image " + path.string());
}

inline void write_gray8(const fs::path& path, const Grid<std::uint8_t>& img) {
  cv::Mat gray(img.height(), img.width(), CV_8UC1);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = gray.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) row[x] = img(x, y);
  }
  if (!cv::imwrite(path.string(), gray))
    throw Error(ErrorCode::IoError, "io", "cannot write map " + path.string());
}

}  // namespace salsum::io
