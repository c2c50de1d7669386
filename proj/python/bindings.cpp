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

// Python bindings. Documents and indexes cross the boundary in their
// persisted forms (canonical JSON text, index bytes) so Python sees exactly
// what the command line writes.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mmvir/builder.hpp"
#include "mmvir/cli.hpp"
#include "mmvir/document.hpp"
#include "mmvir/error.hpp"
#include "mmvir/gateway.hpp"
#include "mmvir/metrics.hpp"
#include "mmvir/retrieval.hpp"
#include "mmvir/segmentation.hpp"
#include "mmvir/series.hpp"
#include "mmvir/synth.hpp"

namespace py = pybind11;
using namespace mmvir;

namespace {

using Matrix = py::array_t<double, py::array::c_style | py::array::forcecast>;

FrameEmbeddingSeries series_from_array(const Matrix& vectors, double fps, const std::string& video_id,
                                       std::optional<std::vector<double>> timestamps) {
  if (vectors.ndim() != 2) throw InputError("vectors must be a 2-D array (frames x dim)");
  FrameEmbeddingSeries s;
  s.video_id = video_id;
  s.fps = fps;
  const auto n = static_cast<std::size_t>(vectors.shape(0));
  s.dim = static_cast<std::size_t>(vectors.shape(1));
  s.vectors.assign(vectors.data(), vectors.data() + n * s.dim);
  if (timestamps) {
    s.timestamps = std::move(*timestamps);
  } else {
    for (std::size_t i = 0; i < n; ++i) s.timestamps.push_back(static_cast<double>(i) / fps);
  }
  if (s.timestamps.size() != n) throw InputError("timestamps length does not match the number of frames");
  normalize_rows(s);
  s.validate();
  return s;
}

Matrix series_matrix(const FrameEmbeddingSeries& s) {
  Matrix out({s.size(), s.dim});
  std::copy(s.vectors.begin(), s.vectors.end(), out.mutable_data());
  return out;
}

seg::SegmentationConfig seg_config(const std::string& method, double min_clip_s, double sub_max_s,
                                   double percentile_q, double kts_penalty) {
  seg::SegmentationConfig c;
  c.method = seg::method_from_string(method);
  c.min_clip_s = min_clip_s;
  c.sub_max_s = sub_max_s;
  c.percentile_q = percentile_q;
  c.kts_penalty = kts_penalty;
  c.validate();
  return c;
}

py::dict prf_dict(const eval::Prf& p) {
  py::dict d;
  d["precision"] = p.precision;
  d["recall"] = p.recall;
  d["f1"] = p.f1;
  d["empty_input"] = p.empty_input;
  return d;
}

std::vector<eval::RetrievalCase> cases_from_py(const py::list& items) {
  std::vector<eval::RetrievalCase> cases;
  for (const auto& obj : items) {
    const auto d = obj.cast<py::dict>();
    eval::RetrievalCase c;
    for (const auto& iv : d["retrieved"].cast<std::vector<std::pair<double, double>>>()) {
      c.retrieved.push_back({"", {iv.first, iv.second}});
    }
    if (d.contains("frames")) c.gt_frames = d["frames"].cast<std::vector<double>>();
    if (d.contains("interval")) {
      const auto iv = d["interval"].cast<std::pair<double, double>>();
      c.gt_interval = TimeInterval{iv.first, iv.second};
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

// Offline index over documents given as canonical JSON text.
class Index {
 public:
  explicit Index(const std::vector<std::string>& documents) : gateway_(gw::Gateway::offline()) {
    for (const auto& d : documents) docs_.push_back(deserialize_document(d));
    index_ = retrieval::build_index(docs_, *gateway_);
  }

  std::size_t size() const { return index_.size(); }

  py::list retrieve(const std::string& query, std::size_t k) {
    const auto r = retrieval::retrieve(index_, query, k, *gateway_);
    py::list out;
    for (const auto& h : r.hits) {
      const auto& e = index_.entries()[h.entry];
      py::dict d;
      d["video_id"] = e.video_id;
      d["clip_id"] = e.clip_id;
      d["interval"] = py::make_tuple(e.interval.start_s, e.interval.end_s);
      d["summary"] = e.summary;
      d["score"] = h.score;
      out.append(std::move(d));
    }
    return out;
  }

  py::dict ask(const std::string& question, const std::vector<std::string>& options, std::size_t k,
               const std::string& mode) {
    const auto r = retrieval::answer_question(index_, docs_, question, options, k,
                                              retrieval::expand_mode_from_string(mode), *gateway_);
    py::dict d;
    d["choice"] = r.choice ? py::cast(*r.choice) : py::none();
    d["raw_answer"] = r.raw_answer;
    d["context_blocks"] = r.stats.blocks;
    d["token_estimate"] = r.stats.token_estimate;
    return d;
  }

  py::bytes to_bytes() const { return py::bytes(retrieval::serialize_index(index_)); }

 private:
  std::unique_ptr<gw::Gateway> gateway_;
  std::vector<VideoDocument> docs_;
  retrieval::TimelineIndex index_;
};

}  // namespace

PYBIND11_MODULE(_mmvir, m) {
  m.doc() = "Hierarchical video representation, retrieval and evaluation";

  static py::exception<InputError> input_error(m, "InputError", PyExc_ValueError);
  static py::exception<GatewayError> gateway_error(m, "GatewayError", PyExc_RuntimeError);
  static py::exception<CaptionParseError> caption_error(m, "CaptionParseError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InputError& e) {
      py::set_error(input_error, e.what());
    } catch (const GatewayError& e) {
      py::set_error(gateway_error, e.what());
    } catch (const CaptionParseError& e) {
      py::set_error(caption_error, e.what());
    }
  });

  py::class_<FrameEmbeddingSeries>(m, "Series")
      .def(py::init(&series_from_array), py::arg("vectors"), py::arg("fps") = 0.5, py::arg("video_id") = "video",
           py::arg("timestamps") = py::none())
      .def_readonly("video_id", &FrameEmbeddingSeries::video_id)
      .def_readonly("fps", &FrameEmbeddingSeries::fps)
      .def_readonly("dim", &FrameEmbeddingSeries::dim)
      .def_readonly("timestamps", &FrameEmbeddingSeries::timestamps)
      .def_property_readonly("vectors", &series_matrix)
      .def_property_readonly("duration", &FrameEmbeddingSeries::duration)
      .def("__len__", &FrameEmbeddingSeries::size)
      .def("to_text", &series_to_text);

  m.def("load_series", [](const std::string& path) { return load_series(path); }, py::arg("path"));
  m.def("hour_long_video", [](std::uint64_t seed, const std::string& id) { return synth::hour_long_video(seed, id).series; },
        py::arg("seed") = 7, py::arg("video_id") = "synth_hour");
  m.def(
      "planted_series",
      [](std::uint64_t seed, std::size_t frames, std::size_t regimes, std::size_t min_len, double noise, std::size_t dim) {
        auto p = synth::random_piecewise_series(seed, frames, regimes, min_len, noise, dim);
        return py::make_tuple(p.series, p.boundaries);
      },
      py::arg("seed"), py::arg("frames"), py::arg("regimes"), py::arg("min_len") = 10, py::arg("noise") = 0.01,
      py::arg("dim") = 64);

  m.def(
      "segment",
      [](const FrameEmbeddingSeries& s, const std::string& method, double min_clip_s, double sub_max_s,
         double percentile_q, double kts_penalty) {
        return seg::segment(s, seg_config(method, min_clip_s, sub_max_s, percentile_q, kts_penalty));
      },
      py::arg("series"), py::arg("method") = "percentile", py::arg("min_clip_s") = 300.0, py::arg("sub_max_s") = 100.0,
      py::arg("percentile_q") = 2.0, py::arg("kts_penalty") = 1.0);
  m.def("consecutive_similarity", [](const FrameEmbeddingSeries& s) {
    const auto sig = seg::consecutive_similarity(s);
    return py::make_tuple(sig.values, sig.timestamps);
  });
  m.def("percentile_threshold", [](const std::vector<double>& v, double q) { return seg::percentile_threshold(v, q); },
        py::arg("values"), py::arg("q"));
  m.def(
      "kts_changepoints",
      [](const Matrix& rows, double penalty, std::optional<std::size_t> max_cp, std::optional<std::size_t> forced_m) {
        if (rows.ndim() != 2) throw InputError("rows must be a 2-D array");
        const auto n = static_cast<std::size_t>(rows.shape(0)), d = static_cast<std::size_t>(rows.shape(1));
        const auto r = seg::kts_changepoints({rows.data(), n * d}, n, d, penalty, max_cp, forced_m);
        return py::make_tuple(r.change_points, r.cost);
      },
      py::arg("rows"), py::arg("penalty") = 1.0, py::arg("max_changepoints") = py::none(),
      py::arg("forced_m") = py::none());
  m.def("split_subsegments", [](double start, double end, double sub_max_s) {
    std::vector<std::pair<double, double>> out;
    for (const auto& iv : seg::split_subsegments({start, end}, sub_max_s)) out.emplace_back(iv.start_s, iv.end_s);
    return out;
  });

  m.def(
      "build_document",
      [](const FrameEmbeddingSeries& s, const std::string& method, double min_clip_s, double sub_max_s,
         double fine_fps, std::size_t parallelism) {
        build::BuildConfig cfg;
        cfg.segmentation.method = seg::method_from_string(method);
        cfg.segmentation.min_clip_s = min_clip_s;
        cfg.segmentation.sub_max_s = sub_max_s;
        cfg.fine_fps = fine_fps;
        cfg.caption_parallelism = parallelism;
        auto g = gw::Gateway::offline();
        VideoDocument doc;
        {
          py::gil_scoped_release release;
          doc = build::build_document(s, cfg, *g);
        }
        return serialize_document(doc);
      },
      py::arg("series"), py::arg("method") = "percentile", py::arg("min_clip_s") = 300.0,
      py::arg("sub_max_s") = 100.0, py::arg("fine_fps") = 0.05, py::arg("parallelism") = 4,
      "Builds a document with the offline gateway; returns its canonical JSON text.");
  m.def(
      "validate_document",
      [](const std::string& text) { return validate_document(document_from_json(Json::parse(text))); },
      py::arg("document"));

  py::class_<Index>(m, "Index")
      .def(py::init<const std::vector<std::string>&>(), py::arg("documents"))
      .def("__len__", &Index::size)
      .def("retrieve", &Index::retrieve, py::arg("query"), py::arg("k") = 10)
      .def("ask", &Index::ask, py::arg("question"), py::arg("options") = std::vector<std::string>{}, py::arg("k") = 10,
           py::arg("mode") = "hybrid")
      .def("to_bytes", &Index::to_bytes);

  m.def("rouge2", [](const std::string& c, const std::string& r) { return prf_dict(eval::rouge2(c, r)); });
  m.def("rougeL", [](const std::string& c, const std::string& r) { return prf_dict(eval::rougeL(c, r)); });
  m.def("meteor", [](const std::string& c, const std::string& r) { return eval::meteor(c, r); });
  m.def(
      "precision_at_k", [](const py::list& cases, std::size_t k) { return eval::precision_at_k(cases_from_py(cases), k); },
      py::arg("cases"), py::arg("k"));
  m.def(
      "overlap_at_k",
      [](const py::list& cases, std::size_t k, const std::string& mode) {
        return eval::overlap_at_k(cases_from_py(cases), k, eval::overlap_mode_from_string(mode));
      },
      py::arg("cases"), py::arg("k"), py::arg("mode") = "recall");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one command line; returns (exit_code, stdout, stderr).");
}
