/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#include "nrvq/frame_io.h"

#include <fstream>
#include <sstream>

#include "nrvq/error.h"
#include "nrvq/text.h"

namespace nrvq {

namespace {

void CheckGeometry(int width, int height) {
  if (width <= 0 || height <= 0 || width % kBlockAlign != 0 ||
      height % kBlockAlign != 0) {
    throw Error(ErrorCode::kUnsupportedGeometry,
                std::to_string(width) + "x" + std::to_string(height) +
                    " is not a multiple of 8");
  }
}

enum class Chroma { k420, kMono };

struct Y4mHeaderFields {
  int width = 0;
  int height = 0;
  FrameRate fps;
  Chroma chroma = Chroma::k420;
};

Y4mHeaderFields ParseHeader(const std::string& line) {
  auto tokens = Split(line, ' ');
  if (tokens.empty() || tokens[0] != "YUV4MPEG2") {
    throw Error(ErrorCode::kParseError, "missing YUV4MPEG2 signature");
  }
  Y4mHeaderFields h;
  bool have_w = false, have_h = false;
  for (size_t i = 1; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (t.empty()) continue;
    const std::string_view value = std::string_view(t).substr(1);
    switch (t[0]) {
      case 'W': {
        auto v = ParseInt(value);
        if (!v) throw Error(ErrorCode::kParseError, "bad width " + t);
        h.width = static_cast<int>(*v);
        have_w = true;
        break;
      }
      case 'H': {
        auto v = ParseInt(value);
        if (!v) throw Error(ErrorCode::kParseError, "bad height " + t);
        h.height = static_cast<int>(*v);
        have_h = true;
        break;
      }
      case 'F': {
        auto parts = Split(value, ':');
        if (parts.size() != 2) {
          throw Error(ErrorCode::kParseError, "bad frame rate " + t);
        }
        auto n = ParseInt(parts[0]);
        auto d = ParseInt(parts[1]);
        if (!n || !d || *n <= 0 || *d <= 0) {
          throw Error(ErrorCode::kParseError, "bad frame rate " + t);
        }
        h.fps = {static_cast<int>(*n), static_cast<int>(*d)};
        break;
      }
      case 'C': {
        if (value == "mono") {
          h.chroma = Chroma::kMono;
        } else if (value == "420" || value == "420jpeg" ||
                   value == "420paldv" || value == "420mpeg2") {
          h.chroma = Chroma::k420;
        } else {
          throw Error(ErrorCode::kParseError,
                      "unsupported colour space " + t);
        }
        break;
      }
      case 'I':
      case 'A':
      case 'X':
        break;
      default:
        throw Error(ErrorCode::kParseError, "unknown header token " + t);
    }
  }
  if (!have_w || !have_h) {
    throw Error(ErrorCode::kParseError, "header lacks W or H");
  }
  return h;
}

}  // namespace

LumaFrame::LumaFrame(int width, int height)
    : width_(width), height_(height) {
  CheckGeometry(width, height);
  samples_.assign(static_cast<size_t>(width) * height, 0);
}

LumaFrame::LumaFrame(int width, int height, std::vector<uint8_t> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  CheckGeometry(width, height);
  if (samples_.size() != static_cast<size_t>(width) * height) {
    throw Error(ErrorCode::kInvalidClip, "sample count does not match "
                                         "frame geometry");
  }
}

VideoClip::VideoClip(std::vector<LumaFrame> frames, FrameRate fps,
                     std::string clip_id)
    : frames_(std::move(frames)), fps_(fps), clip_id_(std::move(clip_id)) {
  if (frames_.size() < 2) {
    throw Error(ErrorCode::kInvalidClip, "clip needs at least 2 frames");
  }
  for (const LumaFrame& f : frames_) {
    if (!f.SameGeometry(frames_.front())) {
      throw Error(ErrorCode::kInvalidClip, "frames differ in geometry");
    }
  }
  if (fps_.num <= 0 || fps_.den <= 0) {
    throw Error(ErrorCode::kInvalidClip, "frame rate must be positive");
  }
}

std::string Y4mHeader(int width, int height, FrameRate fps) {
  std::ostringstream os;
  os << "YUV4MPEG2 W" << width << " H" << height << " F" << fps.num << ":"
     << fps.den << " Ip A1:1 Cmono\n";
  return os.str();
}

VideoClip ReadY4m(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kParseError, "empty file " + path.string());
  }
  const Y4mHeaderFields h = ParseHeader(line);
  CheckGeometry(h.width, h.height);

  const size_t luma = static_cast<size_t>(h.width) * h.height;
  const size_t chroma =
      h.chroma == Chroma::kMono ? 0 : 2 * (luma / 4);
  std::vector<LumaFrame> frames;
  while (std::getline(in, line)) {
    if (line.rfind("FRAME", 0) != 0) {
      throw Error(ErrorCode::kParseError, "expected FRAME marker");
    }
    std::vector<uint8_t> samples(luma);
    in.read(reinterpret_cast<char*>(samples.data()),
            static_cast<std::streamsize>(luma));
    if (static_cast<size_t>(in.gcount()) != luma) {
      throw Error(ErrorCode::kTruncatedInput,
                  "frame " + std::to_string(frames.size()) + " truncated");
    }
    if (chroma > 0) {
      in.ignore(static_cast<std::streamsize>(chroma));
      if (static_cast<size_t>(in.gcount()) != chroma) {
        throw Error(ErrorCode::kTruncatedInput,
                    "chroma of frame " + std::to_string(frames.size()) +
                        " truncated");
      }
    }
    frames.emplace_back(h.width, h.height, std::move(samples));
  }
  return VideoClip(std::move(frames), h.fps, path.stem().string());
}

void WriteY4m(const VideoClip& clip, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << Y4mHeader(clip.width(), clip.height(), clip.fps());
  for (const LumaFrame& f : clip.frames()) {
    out << "FRAME\n";
    out.write(reinterpret_cast<const char*>(f.samples().data()),
              static_cast<std::streamsize>(f.size()));
  }
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failed " + path.string());
}

}  // namespace nrvq
