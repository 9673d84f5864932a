// Copyright 2026 The NESC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end for the codec.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nesc/nesc.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct GlobalOptions {
  std::string weights;
  std::string config;
  std::uint64_t seed = 0;
};

nesc::CodecConfig config_from(const GlobalOptions& g) {
  return g.config.empty() ? nesc::CodecConfig{} : nesc::load_config(g.config);
}

nesc::TensorMap weights_from(const GlobalOptions& g) {
  nesc::require(!g.weights.empty(), nesc::ErrorKind::kInvalidArgument, "--weights is required");
  return nesc::load_weights(g.weights);
}

int cmd_gen_weights(const GlobalOptions& g, const std::string& out) {
  const auto cfg = config_from(g);
  cfg.validate();
  const auto weights = nesc::random_weights(nesc::codec_manifest(cfg), g.seed);
  nesc::save_weights(weights, out);
  std::printf("wrote %zu tensors (%zu parameters) to %s\n", weights.size(),
              weights.parameter_count(), out.c_str());
  return 0;
}

int cmd_encode(const GlobalOptions& g, const std::string& in, const std::string& out,
               std::size_t layers, bool streaming) {
  const nesc::Codec codec(weights_from(g), config_from(g));
  const auto audio = nesc::read_wav(in);
  nesc::require(!audio.samples.empty(), nesc::ErrorKind::kInvalidArgument, "input WAV is empty");
  const auto codes =
      streaming ? nesc::encode_streaming(codec, audio, layers) : codec.encode(audio, layers);
  const auto bytes = nesc::pack(codes, layers);
  nesc::write_file(out, bytes);
  std::printf("encoded %zu packets, %zu layers, payload %zu bytes\n", codes.size(), layers,
              bytes.size() - nesc::kHeaderBytes);
  return 0;
}

int cmd_decode(const GlobalOptions& g, const std::string& in, const std::string& out,
               std::optional<std::size_t> layers, bool streaming) {
  const nesc::Codec codec(weights_from(g), config_from(g));
  const auto stream = nesc::read_file(in);
  auto [header, codes] = nesc::unpack(stream);
  codes = nesc::Codec::select_layers(header, std::move(codes), layers);
  const auto audio = streaming ? nesc::decode_streaming(codec, codes) : codec.decode(codes);
  nesc::write_wav(audio, out);
  std::printf("decoded %zu packets to %zu samples\n", codes.size(), audio.samples.size());
  return 0;
}

int cmd_truncate(const std::string& in, const std::string& out, std::size_t layers) {
  const auto bytes = nesc::truncate_layers(nesc::read_file(in), layers);
  nesc::write_file(out, bytes);
  std::printf("kept %zu layers, payload %zu bytes\n", layers, bytes.size() - nesc::kHeaderBytes);
  return 0;
}

int cmd_train(const GlobalOptions& g, const std::string& corpus, std::size_t iters) {
  nesc::require(iters >= 1, nesc::ErrorKind::kInvalidArgument, "--iters must be >= 1");
  const auto cfg = config_from(g);
  auto weights = weights_from(g);
  const nesc::Codec codec(weights, cfg);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(corpus))
    if (entry.is_regular_file() && entry.path().extension() == ".wav") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  nesc::require(!files.empty(), nesc::ErrorKind::kInvalidArgument,
                "no .wav files in corpus '" + corpus + "'");

  nesc::LatentSequence all;
  for (const auto& f : files) all.latents.append_time(codec.latents(nesc::read_wav(f)).latents);
  std::printf("corpus: %zu files, %zu packets\n", files.size(), all.packets());

  nesc::TrainOptions opt;
  opt.stages = cfg.rvq.stages;
  opt.codebook_size = cfg.rvq.codebook_size();
  opt.iters = iters;
  opt.seed = g.seed;
  const auto report = nesc::train_codebooks(all, opt);
  for (std::size_t s = 0; s < report.iteration_distortion.size(); ++s) {
    std::printf("stage %zu:", s);
    for (double d : report.iteration_distortion[s]) std::printf(" %.6g", d);
    std::printf(" | residual %.6g\n", report.stage_distortion[s]);
  }
  report.model.store(weights);
  nesc::save_weights(weights, g.weights);
  return 0;
}

int cmd_dump_latents(const GlobalOptions& g, const std::string& in, const std::string& out,
                     bool quantized, std::size_t layers) {
  const nesc::Codec codec(weights_from(g), config_from(g));
  const auto audio = nesc::read_wav(in);
  auto latents = codec.latents(audio);
  if (quantized)
    latents = nesc::dequantize_all(nesc::quantize_all(latents, codec.rvq(), layers), codec.rvq());
  std::ofstream csv(out);
  nesc::require(static_cast<bool>(csv), nesc::ErrorKind::kIo, "cannot write '" + out + "'");
  csv << "packet";
  for (std::size_t d = 0; d < latents.dim(); ++d) csv << ",z" << d;
  csv << '\n';
  char buf[32];
  for (std::size_t t = 0; t < latents.packets(); ++t) {
    csv << t;
    for (std::size_t d = 0; d < latents.dim(); ++d) {
      std::snprintf(buf, sizeof buf, ",%.9g", static_cast<double>(latents.latents(d, t)));
      csv << buf;
    }
    csv << '\n';
  }
  std::printf("wrote %zu rows to %s\n", latents.packets(), out.c_str());
  return 0;
}

int cmd_delay_report(const GlobalOptions& g) {
  const auto cfg = config_from(g);
  const auto r = nesc::compute_delay_report(cfg.framing, cfg.pqmf_taps);
  std::printf("framing_lookahead_ms %g\n", r.framing_lookahead_ms);
  std::printf("frame_buffer_ms %g\n", r.frame_buffer_ms);
  std::printf("encoder_side_ms %g\n", r.encoder_side_ms());
  std::printf("decoder_ms %g\n", r.decoder_ms);
  std::printf("total_ms %g\n", r.total_ms);
  return 0;
}

int cmd_bench(const GlobalOptions& g, const std::string& in, double min_seconds) {
  const nesc::Codec codec(weights_from(g), config_from(g));
  const auto clip = nesc::read_wav(in);
  nesc::require(!clip.samples.empty(), nesc::ErrorKind::kInvalidArgument,
                "benchmark needs non-empty audio");
  nesc::AudioBuffer audio;
  while (audio.seconds() < min_seconds)
    audio.samples.insert(audio.samples.end(), clip.samples.begin(), clip.samples.end());

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const auto codes = codec.encode(audio, 3);
  const auto t1 = clock::now();
  const auto out = codec.decode(codes);
  const auto t2 = clock::now();
  const double enc = std::chrono::duration<double>(t1 - t0).count();
  const double dec = std::chrono::duration<double>(t2 - t1).count();
  std::printf("audio_seconds %.2f\n", audio.seconds());
  std::printf("encode_rtf %.2f\n", audio.seconds() / enc);
  std::printf("decode_rtf %.2f\n", audio.seconds() / dec);
  std::printf("output_samples %zu\n", out.samples.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming low-bit-rate neural speech codec"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--weights", g.weights, "Weights file");
  app.add_option("--config", g.config, "Model configuration (JSON)");
  app.add_option("--seed", g.seed, "Random seed");

  std::string in, out;
  std::size_t layers = 3;
  std::optional<std::size_t> decode_layers;
  std::size_t iters = 20;
  bool streaming = false;
  bool quantized = false;
  double bench_seconds = 10.0;

  auto* gen = app.add_subcommand("gen-weights", "Write seeded random weights for the configured model");
  gen->add_option("out", out, "Output weights file")->required();

  auto* enc = app.add_subcommand("encode", "WAV -> .nsc");
  enc->add_option("in", in, "Input WAV (16-bit mono 16 kHz)")->required();
  enc->add_option("out", out, "Output .nsc")->required();
  enc->add_option("--layers", layers, "Codebook layers 1..3")->check(CLI::Range(1, 3));
  enc->add_flag("--streaming", streaming, "Encode hop by hop");

  auto* dec = app.add_subcommand("decode", ".nsc -> WAV");
  dec->add_option("in", in, "Input .nsc")->required();
  dec->add_option("out", out, "Output WAV")->required();
  dec->add_option("--layers", decode_layers, "Decode only the first k layers")->check(CLI::Range(1, 3));
  dec->add_flag("--streaming", streaming, "Decode packet by packet");

  auto* trunc = app.add_subcommand("truncate", "Drop trailing codebook layers from a .nsc");
  trunc->add_option("in", in, "Input .nsc")->required();
  trunc->add_option("out", out, "Output .nsc")->required();
  trunc->add_option("--layers", layers, "Layers to keep")->required()->check(CLI::Range(1, 3));

  auto* train = app.add_subcommand("train-codebooks", "Learn RVQ codebooks from a WAV corpus");
  train->add_option("corpus", in, "Directory of WAV files")->required();
  train->add_option("--iters", iters, "Lloyd iterations per stage");

  auto* dump = app.add_subcommand("dump-latents", "Write per-packet latents as CSV");
  dump->add_option("in", in, "Input WAV")->required();
  dump->add_option("out", out, "Output CSV")->required();
  dump->add_flag("--quantized", quantized, "Export dequantized latents");
  dump->add_option("--layers", layers, "Layers used with --quantized")->check(CLI::Range(1, 3));

  auto* delay = app.add_subcommand("delay-report", "Print the algorithmic delay budget");

  auto* bench = app.add_subcommand("bench", "Measure single-thread real-time factors");
  bench->add_option("in", in, "Input WAV")->required();
  bench->add_option("--min-seconds", bench_seconds, "Minimum audio duration to process");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen_weights(g, out);
    if (*enc) return cmd_encode(g, in, out, layers, streaming);
    if (*dec) return cmd_decode(g, in, out, decode_layers, streaming);
    if (*trunc) return cmd_truncate(in, out, layers);
    if (*train) return cmd_train(g, in, iters);
    if (*dump) return cmd_dump_latents(g, in, out, quantized, layers);
    if (*delay) return cmd_delay_report(g);
    if (*bench) return cmd_bench(g, in, bench_seconds);
  } catch (const nesc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
