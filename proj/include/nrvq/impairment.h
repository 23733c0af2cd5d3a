/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

// Deterministic compression-and-loss channel: blockwise DCT quantization
// stands in for the encoder, macroblock-row packets for the RTP stream, and
// previous-frame copy for the decoder's loss concealment.

#ifndef NRVQ_IMPAIRMENT_H_
#define NRVQ_IMPAIRMENT_H_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nrvq/frame_io.h"

namespace nrvq {

inline constexpr int kMacroblockRows = 16;
inline constexpr int kDefaultMtu = 1400;
// frame_index (u32), first_row (u16), row_count (u16), sequence (u32).
inline constexpr int kPacketHeaderBytes = 12;

struct CompressionLevel {
  int level_index = 0;
  double quant_step = 1.0;
  double nominal_bitrate_kbps = 0.0;
};

// The eight-rung ladder, 64 kbps (coarsest) to 5120 kbps (finest).
const std::vector<CompressionLevel>& StandardLadder();

struct GilbertElliottParams {
  double p_gb = 0.0;  // good -> bad transition probability
  double p_bg = 1.0;  // bad -> good transition probability
  double loss_in_bad = 1.0;
};

struct LossModel {
  enum class Kind { kBernoulli, kGilbertElliott };

  Kind kind = Kind::kBernoulli;
  double loss_rate = 0.0;
  std::optional<GilbertElliottParams> ge_params;
  uint64_t seed = 0;

  static LossModel Bernoulli(double loss_rate, uint64_t seed);
  // Chooses p_gb so that the stationary loss probability equals
  // `loss_rate`. Requires loss_rate <= loss_in_bad and mean_burst >= 1.
  static LossModel GilbertElliott(double loss_rate, double mean_burst_packets,
                                  double loss_in_bad, uint64_t seed);

  // Stationary per-packet loss probability implied by the parameters.
  double StationaryLossRate() const;
};

struct ChannelStats {
  double measured_loss_ratio = 0.0;
  double nominal_bitrate_kbps = 0.0;
  int64_t packets_sent = 0;
  int64_t packets_lost = 0;
};

struct Packet {
  uint32_t sequence = 0;
  uint32_t frame_index = 0;
  uint16_t first_row = 0;  // in macroblock rows
  uint16_t row_count = 0;
  std::vector<uint8_t> payload;

  friend bool operator==(const Packet&, const Packet&) = default;
};

struct PacketStream {
  int width = 0;
  int height = 0;
  size_t frame_count = 0;
  std::vector<Packet> packets;

  int macroblock_rows() const {
    return (height + kMacroblockRows - 1) / kMacroblockRows;
  }
};

// Per 8x8 block: orthonormal DCT-II, uniform quantization, inverse, clamp.
VideoClip CompressProxy(const VideoClip& clip, const CompressionLevel& level);

// Greedily packs whole macroblock rows of one frame per packet. Throws
// MtuTooSmall when a single row plus header exceeds `mtu`.
PacketStream Packetize(const VideoClip& clip, int mtu = kDefaultMtu);

// Lossless inverse of Packetize.
VideoClip Depacketize(const PacketStream& stream, FrameRate fps,
                      const std::string& clip_id);

// Drops packets per the loss model. One uniform draw is consumed per packet
// in sequence order regardless of rate, so for a fixed seed the Bernoulli
// loss pattern at rate p is a subset of the pattern at any rate above p.
// Packets of frame 0 are never dropped.
std::pair<PacketStream, ChannelStats> ApplyLoss(const PacketStream& stream,
                                                const LossModel& model);

// Frame-copy concealment: missing macroblock rows take the co-located rows
// of the previous reconstructed frame.
VideoClip Reconstruct(const PacketStream& stream, const VideoClip& templ);

// MTU used by Degrade for a clip at `level`: the 1400-byte network MTU
// scaled by how many raw luma bytes one coded byte stands for at the
// level's nominal bitrate, so low-bitrate frames travel in few packets and
// high-bitrate frames in many (never less than one macroblock row).
int ChannelMtu(const VideoClip& clip, const CompressionLevel& level);

std::pair<VideoClip, ChannelStats> Degrade(const VideoClip& clip,
                                           const CompressionLevel& level,
                                           const LossModel& model);

// Same as Degrade but starting from an already compressed clip.
std::pair<VideoClip, ChannelStats> TransmitCompressed(
    const VideoClip& compressed, const CompressionLevel& level,
    const LossModel& model);

}  // namespace nrvq

#endif  // NRVQ_IMPAIRMENT_H_
