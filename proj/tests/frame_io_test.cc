/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#include "nrvq/frame_io.h"

#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <functional>
#include <fstream>
#include <string>

#include "nrvq/error.h"
#include "test_clips.h"

namespace nrvq {
namespace {

namespace fs = std::filesystem;

class FrameIoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nrvq_frame_io_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path WriteRaw(const std::string& name, const std::string& bytes) {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << bytes;
    return p;
  }

  static ErrorCode CodeOf(const std::function<void()>& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::kUsageError;
  }

  fs::path dir_;
};

TEST_F(FrameIoTest, ReadsZeroPayloadAndSkipsChroma) {
  std::string bytes = "YUV4MPEG2 W16 H16 F25:1 Ip A1:1 C420jpeg\n";
  for (int f = 0; f < 2; ++f) {
    bytes += "FRAME\n";
    bytes += std::string(256, '\0');
    bytes += std::string(128, '\x80');  // U and V planes
  }
  const VideoClip clip = ReadY4m(WriteRaw("zeros.y4m", bytes));
  ASSERT_EQ(clip.frame_count(), 2u);
  EXPECT_EQ(clip.width(), 16);
  EXPECT_EQ(clip.height(), 16);
  EXPECT_EQ(clip.fps(), (FrameRate{25, 1}));
  EXPECT_EQ(clip.clip_id(), "zeros");
  for (const LumaFrame& f : clip.frames()) {
    for (uint8_t v : f.samples()) ASSERT_EQ(v, 0);
  }
}

TEST_F(FrameIoTest, RoundTripIsBitIdentical) {
  const VideoClip clip = testing::RandomClip(32, 24, 5, 7, "rt");
  const fs::path p = dir_ / "rt.y4m";
  WriteY4m(clip, p);
  EXPECT_EQ(ReadY4m(p), clip);
}

TEST_F(FrameIoTest, EmittedSizeIsHeaderPlusFramePayloads) {
  const VideoClip clip = testing::ConstantClip(8, 8, 2, 3);
  const fs::path p = dir_ / "small.y4m";
  WriteY4m(clip, p);
  const std::string header = Y4mHeader(8, 8, FrameRate{25, 1});
  EXPECT_EQ(header, "YUV4MPEG2 W8 H8 F25:1 Ip A1:1 Cmono\n");
  // Each frame: "FRAME\n" marker then 64 luma bytes.
  EXPECT_EQ(fs::file_size(p), header.size() + 2 * (6 + 64));
}

TEST_F(FrameIoTest, RejectsUnalignedWidth) {
  std::string bytes = "YUV4MPEG2 W17 H16 F25:1 Cmono\nFRAME\n";
  bytes += std::string(17 * 16, '\0');
  const fs::path p = WriteRaw("w17.y4m", bytes);
  EXPECT_EQ(CodeOf([&] { ReadY4m(p); }), ErrorCode::kUnsupportedGeometry);
}

TEST_F(FrameIoTest, RejectsMalformedHeader) {
  const fs::path a = WriteRaw("a.y4m", "YUV4MPEG W16 H16\n");
  EXPECT_EQ(CodeOf([&] { ReadY4m(a); }), ErrorCode::kParseError);
  const fs::path b = WriteRaw("b.y4m", "YUV4MPEG2 W16 F25:1\n");
  EXPECT_EQ(CodeOf([&] { ReadY4m(b); }), ErrorCode::kParseError);
  const fs::path c = WriteRaw("c.y4m", "YUV4MPEG2 W16 H16 C444\n");
  EXPECT_EQ(CodeOf([&] { ReadY4m(c); }), ErrorCode::kParseError);
}

TEST_F(FrameIoTest, RejectsTruncatedPayload) {
  std::string bytes = "YUV4MPEG2 W16 H16 F25:1 Cmono\n";
  bytes += "FRAME\n" + std::string(256, '\0');
  bytes += "FRAME\n" + std::string(100, '\0');
  const fs::path p = WriteRaw("trunc.y4m", bytes);
  EXPECT_EQ(CodeOf([&] { ReadY4m(p); }), ErrorCode::kTruncatedInput);
}

TEST_F(FrameIoTest, ClipInvariants) {
  EXPECT_EQ(CodeOf([] { VideoClip({}, FrameRate{}, "empty"); }),
            ErrorCode::kInvalidClip);
  EXPECT_EQ(CodeOf([] {
              VideoClip({LumaFrame(8, 8)}, FrameRate{}, "single");
            }),
            ErrorCode::kInvalidClip);
  EXPECT_EQ(CodeOf([] {
              VideoClip({LumaFrame(8, 8), LumaFrame(16, 8)}, FrameRate{},
                        "mixed");
            }),
            ErrorCode::kInvalidClip);
  EXPECT_EQ(CodeOf([] { LumaFrame(12, 8); }),
            ErrorCode::kUnsupportedGeometry);
}

TEST_F(FrameIoTest, UnwritablePathIsIoError) {
  const VideoClip clip = testing::ConstantClip(8, 8, 2, 0);
  EXPECT_EQ(CodeOf([&] { WriteY4m(clip, dir_ / "missing" / "x.y4m"); }),
            ErrorCode::kIoError);
}

}  // namespace
}  // namespace nrvq
