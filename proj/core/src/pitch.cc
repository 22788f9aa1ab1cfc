// core/src/pitch.cc

// Copyright 2026 The f0entrain Authors
//
// See ../../COPYING for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "f0entrain/pitch.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>

namespace f0entrain {

namespace {

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
void put32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}
void put16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

}  // namespace

Wave parse_wav(std::span<const unsigned char> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw ParseError("corrupt header: not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::span<const unsigned char> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    const std::uint32_t size = le32(hdr + 4);
    const std::size_t body = pos + 8;
    // Tolerate a truncated final data chunk (common with streamed writers).
    const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (avail < 16) throw ParseError("corrupt header: short fmt chunk");
      const unsigned char* f = bytes.data() + body;
      format = le16(f);
      channels = le16(f + 2);
      rate = le32(f + 4);
      bits = le16(f + 14);
      if (format == kFormatExtensible) {
        if (avail < 26) throw ParseError("corrupt header: short extensible fmt chunk");
        format = le16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = bytes.subspan(body, avail);
      have_data = true;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt || !have_data) throw ParseError("corrupt header: missing fmt or data chunk");
  if (format != kFormatPcm || bits != 16 || (channels != 1 && channels != 2))
    throw ParseError("unsupported encoding: format " + std::to_string(format) + ", " +
                     std::to_string(bits) + " bits, " + std::to_string(channels) +
                     " channels (need 16-bit PCM, mono or stereo)");
  if (rate == 0) throw ParseError("corrupt header: zero sample rate");

  Wave w;
  w.sample_rate = rate;
  const std::size_t frame_bytes = 2u * channels;
  const std::size_t frames = data.size() / frame_bytes;
  w.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const auto v = static_cast<std::int16_t>(le16(data.data() + i * frame_bytes + 2 * c));
      acc += static_cast<double>(v) / 32768.0;
    }
    w.samples[i] = acc / channels;
  }
  return w;
}

Wave read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  try {
    return parse_wav(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<unsigned char> encode_wav(const Wave& wave) {
  const auto n = static_cast<std::uint32_t>(wave.samples.size());
  const auto rate = static_cast<std::uint32_t>(std::lround(wave.sample_rate));
  std::vector<unsigned char> out;
  out.reserve(44 + 2 * n);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put32(out, 36 + 2 * n);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put32(out, 16);
  put16(out, kFormatPcm);
  put16(out, 1);
  put32(out, rate);
  put32(out, rate * 2);
  put16(out, 2);
  put16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put32(out, 2 * n);
  for (double s : wave.samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    const long v = std::clamp(std::lround(c * 32768.0), -32768L, 32767L);
    put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const Wave& wave) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const auto bytes = encode_wav(wave);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void PitchConfig::validate(double sample_rate) const {
  if (!(sample_rate > 0.0)) throw ValidationError("sample rate must be positive");
  if (!(floor > 0.0 && floor < ceiling && ceiling < sample_rate / 2.0))
    throw ValidationError("pitch config needs 0 < floor < ceiling < sample_rate/2");
  if (!(time_step > 0.0)) throw ValidationError("pitch time step must be positive");
  if (!(window > 0.0)) throw ValidationError("pitch window must be positive");
  if (!(voicing_threshold > 0.0 && voicing_threshold < 1.0))
    throw ValidationError("voicing threshold must lie in (0,1)");
}

F0Track estimate_f0(const Wave& wave, const PitchConfig& config) {
  config.validate(wave.sample_rate);
  const double sr = wave.sample_rate;
  const auto win = static_cast<std::size_t>(std::lround(config.window * sr));
  const std::size_t n = wave.samples.size();
  if (win < 4 || n < win)
    throw NumericError("wave too short: " + std::to_string(n) +
                       " samples, analysis window needs " + std::to_string(win));

  const auto min_lag = static_cast<std::size_t>(std::max(2.0, std::ceil(sr / config.ceiling)));
  const auto max_lag = static_cast<std::size_t>(std::floor(sr / config.floor));
  if (max_lag + 2 >= win)
    throw ValidationError("pitch window shorter than two periods at the pitch floor");

  std::vector<double> hann(win);
  for (std::size_t j = 0; j < win; ++j)
    hann[j] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(j) /
                                   static_cast<double>(win - 1));
  // Autocorrelation of the window itself, used to undo its taper.
  std::vector<double> win_ac(max_lag + 2);
  for (std::size_t lag = 0; lag < win_ac.size(); ++lag) {
    double s = 0.0;
    for (std::size_t j = 0; j + lag < win; ++j) s += hann[j] * hann[j + lag];
    win_ac[lag] = s;
  }
  for (std::size_t lag = win_ac.size(); lag-- > 0;) win_ac[lag] /= win_ac[0];

  double global_ss = 0.0;
  for (double s : wave.samples) global_ss += s * s;
  const double global_rms = std::sqrt(global_ss / static_cast<double>(n));

  const double hop = config.time_step * sr;
  const auto frames = static_cast<std::size_t>(
      std::floor(static_cast<double>(n - win) / hop + 1e-9)) + 1;

  F0Track track;
  track.start_time = static_cast<double>(win) / (2.0 * sr);
  track.step = config.time_step;
  track.samples.resize(frames);

  std::vector<double> frame(win);
  std::vector<double> ac(max_lag + 2);
  for (std::size_t f = 0; f < frames; ++f) {
    const auto begin = static_cast<std::size_t>(std::llround(static_cast<double>(f) * hop));
    double m = 0.0, ss = 0.0;
    for (std::size_t j = 0; j < win; ++j) {
      const double x = wave.samples[begin + j];
      m += x;
      ss += x * x;
    }
    const double frame_rms = std::sqrt(ss / static_cast<double>(win));
    if (global_rms == 0.0 || frame_rms < config.silence_ratio * global_rms) continue;

    m /= static_cast<double>(win);
    for (std::size_t j = 0; j < win; ++j) frame[j] = (wave.samples[begin + j] - m) * hann[j];
    for (std::size_t lag = 0; lag < ac.size(); ++lag) {
      double s = 0.0;
      for (std::size_t j = 0; j + lag < win; ++j) s += frame[j] * frame[j + lag];
      ac[lag] = s;
    }
    if (ac[0] <= 0.0) continue;
    const double r0 = ac[0];
    for (std::size_t lag = 0; lag < ac.size(); ++lag) ac[lag] = ac[lag] / r0 / win_ac[lag];

    double best_strength = -1e300, best_peak = 0.0, best_lag = 0.0;
    for (std::size_t lag = min_lag; lag <= max_lag; ++lag) {
      const double l = ac[lag - 1], c = ac[lag], r = ac[lag + 1];
      if (!(c > l && c >= r)) continue;
      const double denom = l - 2.0 * c + r;
      const double delta = denom < 0.0 ? 0.5 * (l - r) / denom : 0.0;
      const double peak = c - 0.25 * (l - r) * delta;
      const double refined = static_cast<double>(lag) + delta;
      const double freq = sr / refined;
      if (freq < config.floor || freq > config.ceiling) continue;
      const double strength = peak - config.octave_cost * std::log2(config.floor / freq);
      if (strength > best_strength) {
        best_strength = strength;
        best_peak = peak;
        best_lag = refined;
      }
    }
    if (best_lag > 0.0 && best_peak >= config.voicing_threshold)
      track.samples[f] = {sr / best_lag, true};
  }
  return track;
}

}  // namespace f0entrain
