/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#ifndef NRVQ_FRAME_IO_H_
#define NRVQ_FRAME_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace nrvq {

// Width and height must both be multiples of this.
inline constexpr int kBlockAlign = 8;

// Row-major 8-bit luma plane.
class LumaFrame {
 public:
  // Zero-filled frame. Throws UnsupportedGeometry unless both dimensions
  // are positive multiples of 8.
  LumaFrame(int width, int height);
  LumaFrame(int width, int height, std::vector<uint8_t> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  size_t size() const { return samples_.size(); }

  uint8_t at(int x, int y) const { return samples_[y * width_ + x]; }
  uint8_t& at(int x, int y) { return samples_[y * width_ + x]; }

  std::span<const uint8_t> samples() const { return samples_; }
  std::span<uint8_t> samples() { return samples_; }
  std::span<const uint8_t> row(int y) const {
    return std::span<const uint8_t>(samples_).subspan(y * width_, width_);
  }
  std::span<uint8_t> row(int y) {
    return std::span<uint8_t>(samples_).subspan(y * width_, width_);
  }

  bool SameGeometry(const LumaFrame& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const LumaFrame&, const LumaFrame&) = default;

 private:
  int width_;
  int height_;
  std::vector<uint8_t> samples_;
};

struct FrameRate {
  int num = 25;
  int den = 1;

  double value() const { return static_cast<double>(num) / den; }
  friend bool operator==(const FrameRate&, const FrameRate&) = default;
};

// At least two frames of identical geometry (temporal features need a
// successor). Construction throws InvalidClip otherwise.
class VideoClip {
 public:
  VideoClip(std::vector<LumaFrame> frames, FrameRate fps, std::string clip_id);

  const std::vector<LumaFrame>& frames() const { return frames_; }
  const LumaFrame& frame(size_t i) const { return frames_[i]; }
  size_t frame_count() const { return frames_.size(); }
  int width() const { return frames_.front().width(); }
  int height() const { return frames_.front().height(); }
  FrameRate fps() const { return fps_; }
  const std::string& clip_id() const { return clip_id_; }

  bool SameGeometry(const VideoClip& other) const {
    return width() == other.width() && height() == other.height();
  }

  friend bool operator==(const VideoClip&, const VideoClip&) = default;

 private:
  std::vector<LumaFrame> frames_;
  FrameRate fps_;
  std::string clip_id_;
};

// Reads 8-bit 4:2:0 or 4:0:0 YUV4MPEG2; chroma planes are skipped. Frames
// are streamed one at a time. clip_id is the file stem.
VideoClip ReadY4m(const std::filesystem::path& path);

// Writes mono (Cmono) YUV4MPEG2.
void WriteY4m(const VideoClip& clip, const std::filesystem::path& path);

// Exact header line emitted by WriteY4m, including the trailing newline.
std::string Y4mHeader(int width, int height, FrameRate fps);

}  // namespace nrvq

#endif  // NRVQ_FRAME_IO_H_
