/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#include "nrvq/impairment.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "nrvq/error.h"
#include "nrvq/rng.h"

namespace nrvq {

namespace {

using Basis = std::array<std::array<double, 8>, 8>;

// basis[k][n] = c(k) cos((2n+1) k pi / 16), orthonormal.
const Basis& DctBasis() {
  static const Basis basis = [] {
    Basis b{};
    for (int k = 0; k < 8; ++k) {
      const double scale = k == 0 ? std::sqrt(1.0 / 8) : std::sqrt(2.0 / 8);
      for (int n = 0; n < 8; ++n) {
        b[k][n] = scale * std::cos((2 * n + 1) * k * M_PI / 16.0);
      }
    }
    return b;
  }();
  return basis;
}

void QuantizeBlock(LumaFrame& frame, int bx, int by, double step) {
  const Basis& c = DctBasis();
  double block[8][8];
  double tmp[8][8];
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) block[y][x] = frame.at(bx + x, by + y);
  }
  // Rows then columns.
  for (int y = 0; y < 8; ++y) {
    for (int k = 0; k < 8; ++k) {
      double s = 0.0;
      for (int n = 0; n < 8; ++n) s += c[k][n] * block[y][n];
      tmp[y][k] = s;
    }
  }
  for (int k = 0; k < 8; ++k) {
    for (int u = 0; u < 8; ++u) {
      double s = 0.0;
      for (int n = 0; n < 8; ++n) s += c[u][n] * tmp[n][k];
      block[u][k] = std::round(s / step) * step;
    }
  }
  // Inverse: columns then rows.
  for (int k = 0; k < 8; ++k) {
    for (int n = 0; n < 8; ++n) {
      double s = 0.0;
      for (int u = 0; u < 8; ++u) s += c[u][n] * block[u][k];
      tmp[n][k] = s;
    }
  }
  for (int y = 0; y < 8; ++y) {
    for (int n = 0; n < 8; ++n) {
      double s = 0.0;
      for (int k = 0; k < 8; ++k) s += c[k][n] * tmp[y][k];
      frame.at(bx + n, by + y) =
          static_cast<uint8_t>(std::clamp(std::round(s), 0.0, 255.0));
    }
  }
}

int RowPixelCount(const PacketStream& s, int mb_row) {
  const int first = mb_row * kMacroblockRows;
  return std::min(kMacroblockRows, s.height - first);
}

}  // namespace

const std::vector<CompressionLevel>& StandardLadder() {
  // Step follows 8 * (5120 / bitrate)^0.55, rounded to 0.1.
  static const std::vector<CompressionLevel> ladder = [] {
    const double rates[] = {64, 640, 768, 1024, 2048, 3072, 4096, 5120};
    std::vector<CompressionLevel> out;
    for (int i = 0; i < 8; ++i) {
      const double step =
          std::round(80.0 * std::pow(5120.0 / rates[i], 0.55)) / 10.0;
      out.push_back({i, step, rates[i]});
    }
    return out;
  }();
  return ladder;
}

LossModel LossModel::Bernoulli(double loss_rate, uint64_t seed) {
  if (!(loss_rate >= 0.0 && loss_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "loss rate outside [0,1]");
  }
  LossModel m;
  m.kind = Kind::kBernoulli;
  m.loss_rate = loss_rate;
  m.seed = seed;
  return m;
}

LossModel LossModel::GilbertElliott(double loss_rate,
                                    double mean_burst_packets,
                                    double loss_in_bad, uint64_t seed) {
  if (!(loss_rate >= 0.0 && loss_in_bad > 0.0 && loss_in_bad <= 1.0 &&
        loss_rate <= loss_in_bad && mean_burst_packets >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid Gilbert-Elliott parameters");
  }
  const double pi_bad = loss_rate / loss_in_bad;
  GilbertElliottParams p;
  p.p_bg = 1.0 / mean_burst_packets;
  p.loss_in_bad = loss_in_bad;
  // pi_bad = p_gb / (p_gb + p_bg)
  p.p_gb = pi_bad >= 1.0 ? 1.0 : p.p_bg * pi_bad / (1.0 - pi_bad);
  if (p.p_gb > 1.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "loss rate unreachable with this burst length");
  }
  LossModel m;
  m.kind = Kind::kGilbertElliott;
  m.loss_rate = loss_rate;
  m.ge_params = p;
  m.seed = seed;
  return m;
}

double LossModel::StationaryLossRate() const {
  if (kind == Kind::kBernoulli || !ge_params) return loss_rate;
  const auto& p = *ge_params;
  if (p.p_gb + p.p_bg <= 0.0) return 0.0;
  return p.p_gb / (p.p_gb + p.p_bg) * p.loss_in_bad;
}

VideoClip CompressProxy(const VideoClip& clip, const CompressionLevel& level) {
  if (!(level.quant_step > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "quant step must be positive");
  }
  std::vector<LumaFrame> frames = clip.frames();
  for (LumaFrame& f : frames) {
    for (int by = 0; by < f.height(); by += 8) {
      for (int bx = 0; bx < f.width(); bx += 8) {
        QuantizeBlock(f, bx, by, level.quant_step);
      }
    }
  }
  return VideoClip(std::move(frames), clip.fps(), clip.clip_id());
}

PacketStream Packetize(const VideoClip& clip, int mtu) {
  PacketStream s;
  s.width = clip.width();
  s.height = clip.height();
  s.frame_count = clip.frame_count();
  const int row_bytes = s.width * kMacroblockRows;
  if (mtu < kPacketHeaderBytes + row_bytes) {
    throw Error(ErrorCode::kMtuTooSmall,
                "mtu " + std::to_string(mtu) + " cannot carry a " +
                    std::to_string(row_bytes) + "-byte macroblock row");
  }
  const int rows_per_packet = (mtu - kPacketHeaderBytes) / row_bytes;
  const int mb_rows = s.macroblock_rows();
  uint32_t seq = 0;
  for (size_t fi = 0; fi < clip.frame_count(); ++fi) {
    const LumaFrame& f = clip.frame(fi);
    for (int r = 0; r < mb_rows; r += rows_per_packet) {
      Packet p;
      p.sequence = seq++;
      p.frame_index = static_cast<uint32_t>(fi);
      p.first_row = static_cast<uint16_t>(r);
      p.row_count = static_cast<uint16_t>(std::min(rows_per_packet,
                                                   mb_rows - r));
      const int y0 = r * kMacroblockRows;
      const int y1 = std::min(s.height, (r + p.row_count) * kMacroblockRows);
      auto src = f.samples().subspan(static_cast<size_t>(y0) * s.width,
                                     static_cast<size_t>(y1 - y0) * s.width);
      p.payload.assign(src.begin(), src.end());
      s.packets.push_back(std::move(p));
    }
  }
  return s;
}

VideoClip Depacketize(const PacketStream& stream, FrameRate fps,
                      const std::string& clip_id) {
  std::vector<LumaFrame> frames(stream.frame_count,
                                LumaFrame(stream.width, stream.height));
  for (const Packet& p : stream.packets) {
    auto dst = frames.at(p.frame_index).samples();
    const size_t offset =
        static_cast<size_t>(p.first_row) * kMacroblockRows * stream.width;
    if (offset + p.payload.size() > dst.size()) {
      throw Error(ErrorCode::kGeometryMismatch, "packet exceeds frame");
    }
    std::copy(p.payload.begin(), p.payload.end(), dst.begin() + offset);
  }
  return VideoClip(std::move(frames), fps, clip_id);
}

std::pair<PacketStream, ChannelStats> ApplyLoss(const PacketStream& stream,
                                                const LossModel& model) {
  Rng rng(model.seed);
  PacketStream out;
  out.width = stream.width;
  out.height = stream.height;
  out.frame_count = stream.frame_count;
  ChannelStats stats;
  stats.packets_sent = static_cast<int64_t>(stream.packets.size());

  const bool ge = model.kind == LossModel::Kind::kGilbertElliott &&
                  model.ge_params.has_value();
  bool bad = false;
  if (ge) {
    const double pi_bad =
        model.StationaryLossRate() / model.ge_params->loss_in_bad;
    bad = rng.Uniform() < pi_bad;
  }
  for (const Packet& p : stream.packets) {
    bool lost;
    if (ge) {
      const auto& g = *model.ge_params;
      const double u_loss = rng.Uniform();
      lost = bad && u_loss < g.loss_in_bad;
      const double u_move = rng.Uniform();
      bad = bad ? !(u_move < g.p_bg) : u_move < g.p_gb;
    } else {
      lost = rng.Uniform() < model.loss_rate;
    }
    if (p.frame_index == 0) lost = false;
    if (lost) {
      ++stats.packets_lost;
    } else {
      out.packets.push_back(p);
    }
  }
  stats.measured_loss_ratio =
      stats.packets_sent == 0
          ? 0.0
          : static_cast<double>(stats.packets_lost) / stats.packets_sent;
  return {std::move(out), stats};
}

VideoClip Reconstruct(const PacketStream& stream, const VideoClip& templ) {
  if (stream.width != templ.width() || stream.height != templ.height() ||
      stream.frame_count != templ.frame_count()) {
    throw Error(ErrorCode::kGeometryMismatch,
                "packet stream does not match template clip");
  }
  const int mb_rows = stream.macroblock_rows();
  // Frame 0 rows missing from a hand-built stream stay black.
  std::vector<LumaFrame> frames;
  frames.reserve(stream.frame_count);
  LumaFrame current(stream.width, stream.height);
  size_t next = 0;
  for (size_t fi = 0; fi < stream.frame_count; ++fi) {
    // `current` already holds the previous reconstruction, which is the
    // concealment source for any row not delivered below.
    while (next < stream.packets.size() &&
           stream.packets[next].frame_index == fi) {
      const Packet& p = stream.packets[next++];
      if (p.first_row + p.row_count > mb_rows) {
        throw Error(ErrorCode::kGeometryMismatch, "packet rows out of range");
      }
      int expected = 0;
      for (int r = p.first_row; r < p.first_row + p.row_count; ++r) {
        expected += RowPixelCount(stream, r) * stream.width;
      }
      if (static_cast<size_t>(expected) != p.payload.size()) {
        throw Error(ErrorCode::kGeometryMismatch, "payload size mismatch");
      }
      auto dst = current.samples();
      const size_t offset =
          static_cast<size_t>(p.first_row) * kMacroblockRows * stream.width;
      std::copy(p.payload.begin(), p.payload.end(), dst.begin() + offset);
    }
    frames.push_back(current);
  }
  if (next != stream.packets.size()) {
    throw Error(ErrorCode::kGeometryMismatch,
                "packets out of frame order or beyond frame count");
  }
  return VideoClip(std::move(frames), templ.fps(), templ.clip_id());
}

int ChannelMtu(const VideoClip& clip, const CompressionLevel& level) {
  const int row_bytes = clip.width() * kMacroblockRows;
  const int mb_rows = (clip.height() + kMacroblockRows - 1) / kMacroblockRows;
  const double coded_frame_bytes =
      level.nominal_bitrate_kbps * 1000.0 / 8.0 / clip.fps().value();
  const int capacity = kDefaultMtu - kPacketHeaderBytes;
  const int coded_packets = std::max(
      1, static_cast<int>(std::ceil(coded_frame_bytes / capacity)));
  const int rows_per_packet =
      std::max(1, (mb_rows + coded_packets - 1) / coded_packets);
  return kPacketHeaderBytes + rows_per_packet * row_bytes;
}

std::pair<VideoClip, ChannelStats> TransmitCompressed(
    const VideoClip& compressed, const CompressionLevel& level,
    const LossModel& model) {
  PacketStream stream = Packetize(compressed, ChannelMtu(compressed, level));
  auto [received, stats] = ApplyLoss(stream, model);
  stats.nominal_bitrate_kbps = level.nominal_bitrate_kbps;
  return {Reconstruct(received, compressed), stats};
}

std::pair<VideoClip, ChannelStats> Degrade(const VideoClip& clip,
                                           const CompressionLevel& level,
                                           const LossModel& model) {
  return TransmitCompressed(CompressProxy(clip, level), level, model);
}

}  // namespace nrvq
