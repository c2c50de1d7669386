// Copyright 2026 The mmvir Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Writes a synthetic embedding series with planted regime changes.

#include <CLI11.hpp>
#include <iostream>

#include "mmvir/canonical_json.hpp"
#include "mmvir/error.hpp"
#include "mmvir/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mmvir_synth: synthetic frame-embedding series"};
  std::string out, video_id = "synth";
  std::size_t frames = 1800, regimes = 0, min_len = 150, dim = 64;
  double noise = 0.01, fps = 0.5;
  std::uint64_t seed = 7;
  bool binary = false;
  app.add_option("-o,--out", out, "Output series file")->required();
  app.add_option("--video-id", video_id, "Video identifier");
  app.add_option("--frames", frames, "Frame count");
  app.add_option("--regimes", regimes, "Regime count (0: one-hour preset when frames = 1800)");
  app.add_option("--min-len", min_len, "Minimum regime length in frames");
  app.add_option("--dim", dim, "Embedding dimension");
  app.add_option("--noise", noise, "Per-coordinate noise sigma");
  app.add_option("--fps", fps, "Sampling rate");
  app.add_option("--seed", seed, "Random seed");
  app.add_flag("--binary", binary, "Write the binary format");
  CLI11_PARSE(app, argc, argv);

  try {
    mmvir::synth::PlantedSeries s;
    if (regimes == 0) {
      s = mmvir::synth::hour_long_video(seed, video_id);
    } else {
      s = mmvir::synth::random_piecewise_series(seed, frames, regimes, min_len, noise, dim, fps, video_id);
    }
    mmvir::write_file_atomic(out, binary ? mmvir::series_to_binary(s.series) : mmvir::series_to_text(s.series));
    std::cout << "wrote " << s.series.size() << " frames, planted change points:";
    for (auto cp : s.change_points) std::cout << ' ' << cp;
    std::cout << '\n';
  } catch (const mmvir::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
