// Copyright 2026 The Forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cstring>

#include "forge/audio.hpp"
#include "forge/error.hpp"
#include "oracles.hpp"

namespace {

using forge::AudioBuffer;

TEST(DecodeWav, StereoSilenceDownmixesToMono) {
  const std::vector<std::int16_t> pcm(44100 * 2, 0);
  const auto buf = forge::decode_wav(oracle::pcm16_wav(pcm, 2, 44100));
  EXPECT_EQ(buf.sample_rate, 44100);
  ASSERT_EQ(buf.size(), 44100);
  EXPECT_EQ(buf.samples.cwiseAbs().maxCoeff(), 0.0f);
}

TEST(DecodeWav, FullScalePositive) {
  const std::vector<std::int16_t> pcm(100, 0x7FFF);
  const auto buf = forge::decode_wav(oracle::pcm16_wav(pcm, 1, 16000));
  for (Eigen::Index i = 0; i < buf.size(); ++i) EXPECT_FLOAT_EQ(buf.samples[i], 32767.0f / 32768.0f);
}

TEST(DecodeWav, IdenticalChannelsDownmixExactly) {
  std::vector<std::int16_t> pcm;
  std::vector<std::int16_t> mono;
  for (int i = 0; i < 1000; ++i) {
    const auto v = static_cast<std::int16_t>((i * 7919) % 65536 - 32768);
    pcm.push_back(v);
    pcm.push_back(v);
    mono.push_back(v);
  }
  const auto st = forge::decode_wav(oracle::pcm16_wav(pcm, 2, 8000));
  const auto mo = forge::decode_wav(oracle::pcm16_wav(mono, 1, 8000));
  EXPECT_EQ(st.samples, mo.samples);
}

TEST(DecodeWav, MissingDataChunkIsFormatError) {
  auto bytes = oracle::pcm16_wav({1, 2, 3}, 1, 16000);
  bytes.resize(36);  // header and fmt chunk only
  try {
    forge::decode_wav(bytes);
    FAIL() << "expected FormatError";
  } catch (const forge::FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("data"), std::string::npos) << e.what();
  }
}

TEST(DecodeWav, NotRiffIsFormatError) {
  const std::vector<std::uint8_t> junk(64, 'x');
  EXPECT_THROW(forge::decode_wav(junk), forge::FormatError);
}

TEST(DecodeWav, UnsupportedCodecNamesTag) {
  auto bytes = oracle::pcm16_wav({1, 2, 3, 4}, 1, 8000);
  bytes[20] = 7;  // mu-law
  bytes[21] = 0;
  bytes[34] = 8;
  try {
    forge::decode_wav(bytes);
    FAIL() << "expected UnsupportedCodec";
  } catch (const forge::UnsupportedCodec& e) {
    EXPECT_NE(std::string(e.what()).find('7'), std::string::npos) << e.what();
  }
}

TEST(EncodeWav, SilentSecondLayout) {
  AudioBuffer b(AudioBuffer::Samples::Zero(16000), 16000);
  const auto bytes = forge::encode_wav(b);
  ASSERT_EQ(bytes.size(), 44u + 32000u);
  std::uint32_t data_size = 0;
  std::memcpy(&data_size, bytes.data() + 40, 4);
  EXPECT_EQ(data_size, 32000u);
  const auto info = forge::probe_wav(bytes);
  EXPECT_EQ(info.frames, 16000);
  EXPECT_EQ(info.channels, 1);
  EXPECT_EQ(info.bits_per_sample, 16);
}

TEST(EncodeWav, EmptyBufferRoundTrips) {
  AudioBuffer b(AudioBuffer::Samples(0), 22050);
  const auto back = forge::decode_wav(forge::encode_wav(b));
  EXPECT_EQ(back.size(), 0);
  EXPECT_EQ(back.sample_rate, 22050);
}

TEST(EncodeWav, SineRoundTripWithinOneLsb) {
  const auto s = oracle::sine(440.0, 1.0, 16000, 0.9);
  const auto back = forge::decode_wav(forge::encode_wav(s));
  ASSERT_EQ(back.size(), s.size());
  const double err = (back.samples - s.samples).cwiseAbs().maxCoeff();
  EXPECT_LE(err, 1.0 / 32768.0);
}

TEST(EncodeWav, SaturatesOutOfRange) {
  AudioBuffer b(AudioBuffer::Samples::Constant(4, 3.0f), 8000);
  b.samples[1] = -3.0f;
  const auto back = forge::decode_wav(forge::encode_wav(b));
  EXPECT_FLOAT_EQ(back.samples[0], 32767.0f / 32768.0f);
  EXPECT_FLOAT_EQ(back.samples[1], -1.0f);
}

TEST(Resample, IdentityReturnsInput) {
  const auto s = oracle::sine(300.0, 0.5, 22050);
  const auto r = forge::resample(s, 22050);
  EXPECT_EQ(r.samples, s.samples);
  EXPECT_EQ(r.sample_rate, 22050);
}

TEST(Resample, ZeroRateIsInvalid) {
  const auto s = oracle::sine(300.0, 0.1, 16000);
  EXPECT_THROW(forge::resample(s, 0), forge::InvalidArgument);
  EXPECT_THROW(forge::resample(s, -5), forge::InvalidArgument);
}

TEST(Resample, LengthRatio) {
  for (int src : {8000, 11025, 22050, 44100, 48000}) {
    for (int dst : {8000, 16000, 44100}) {
      const auto s = oracle::sine(200.0, 1.0, src);
      const auto r = forge::resample(s, dst);
      const double expect = static_cast<double>(s.size()) * dst / src;
      EXPECT_LE(std::abs(static_cast<double>(r.size()) - expect), 1.0) << src << "->" << dst;
      EXPECT_EQ(r.size(), forge::resampled_length(s.size(), src, dst));
      EXPECT_LE(std::abs(r.duration_seconds() - s.duration_seconds()), 1.0 / dst);
    }
  }
}

TEST(Resample, TonePeakSurvivesDownsampling) {
  const auto s = oracle::sine(440.0, 1.0, 44100);
  const auto r = forge::resample(s, 16000);
  const auto x = oracle::to_vector(r);
  // 16000-point DFT: 1 Hz bins.
  const std::size_t peak = oracle::dft_peak_bin(x, 16000, 400, 480);
  EXPECT_LE(std::abs(static_cast<long>(peak) - 440L), 1L);
}

TEST(Resample, PassbandAmplitudePreserved) {
  const auto s = oracle::sine(1000.0, 1.0, 48000, 0.5);
  const auto r = forge::resample(s, 16000);
  const auto mid = r.samples.segment(2000, 12000);
  EXPECT_NEAR(mid.cwiseAbs().maxCoeff(), 0.5, 0.01);
}

TEST(Resample, AboveNyquistIsSuppressed) {
  // 7 kHz at 44.1 kHz would alias to 1 kHz at 8 kHz without filtering.
  const auto s = oracle::sine(7000.0, 1.0, 44100, 0.5);
  const auto r = forge::resample(s, 8000);
  const double rms = std::sqrt(forge::mean_power(r.samples.segment(800, 6400)));
  EXPECT_LT(20.0 * std::log10(rms / (0.5 / std::sqrt(2.0))), -40.0);
}

TEST(Resample, UpsamplingMatchesLinearOnSmoothInput) {
  const auto s = oracle::sine(50.0, 0.5, 8000, 0.5);
  const auto a = forge::resample(s, 16000);
  const auto b = forge::resample_linear(s, 16000);
  ASSERT_EQ(a.size(), b.size());
  const double err = (a.samples - b.samples).segment(500, a.size() - 1000).cwiseAbs().maxCoeff();
  EXPECT_LT(err, 1e-3);
}

TEST(WavFile, WriteReadProbe) {
  oracle::TempDir dir;
  const auto s = oracle::sine(440.0, 0.25, 16000);
  forge::write_wav_file(dir / "a.wav", s);
  const auto info = forge::probe_wav_file(dir / "a.wav");
  EXPECT_EQ(info.frames, s.size());
  EXPECT_EQ(info.sample_rate, 16000u);
  const auto back = forge::read_wav_file(dir / "a.wav");
  EXPECT_LE((back.samples - s.samples).cwiseAbs().maxCoeff(), 1.0 / 32768.0);
  EXPECT_THROW(forge::read_wav_file(dir / "missing.wav"), forge::Error);
}

}  // namespace
