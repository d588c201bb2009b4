#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "agesign/annotate.hpp"
#include "agesign/benchmark.hpp"
#include "agesign/pipeline.hpp"
#include "agesign/pnm.hpp"
#include "agesign/stream.hpp"

namespace py = pybind11;
using namespace agesign;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

ColorImage color_from(const U8Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw py::value_error("expected an (H, W, 3) uint8 array");
  const auto h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
  std::vector<Rgb> px(static_cast<std::size_t>(w) * h);
  std::memcpy(px.data(), a.data(), px.size() * 3);
  return ColorImage(w, h, std::move(px));
}

template <class Img>
Img plane_from(const U8Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected an (H, W) uint8 array");
  const auto h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
  std::vector<std::uint8_t> px(a.data(), a.data() + a.size());
  return Img(w, h, std::move(px));
}

U8Array to_array(const ColorImage& img) {
  U8Array out({img.height(), img.width(), 3});
  std::memcpy(out.mutable_data(), img.pixels().data(), img.size() * 3);
  return out;
}

template <class Img>
U8Array to_array(const Img& img) {
  U8Array out({img.height(), img.width()});
  std::memcpy(out.mutable_data(), img.pixels().data(), img.size());
  return out;
}

std::vector<Point> points_from(const py::array_t<int, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(1) != 2) throw py::value_error("expected an (N, 2) array of (x, y)");
  std::vector<Point> pts(static_cast<std::size_t>(a.shape(0)));
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {a.data()[2 * i], a.data()[2 * i + 1]};
  return pts;
}

py::array_t<int> points_to(const std::vector<Point>& pts) {
  py::array_t<int> out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out.mutable_data()[2 * i] = pts[i].x;
    out.mutable_data()[2 * i + 1] = pts[i].y;
  }
  return out;
}

FeatureVector features_from(const py::array_t<int, py::array::c_style | py::array::forcecast>& a) {
  if (a.size() != kFeatureCount) throw py::value_error("expected 80 feature counts");
  FeatureVector f;
  for (int i = 0; i < kFeatureCount; ++i) {
    const int v = a.data()[i];
    if (v < 0 || v > kGlyphCols) throw py::value_error("feature counts must lie in [0, 40]");
    f.counts[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v);
  }
  return f;
}

py::array_t<int> features_to(const FeatureVector& f) {
  py::array_t<int> out(kFeatureCount);
  for (int i = 0; i < kFeatureCount; ++i) out.mutable_data()[i] = f.counts[static_cast<std::size_t>(i)];
  return out;
}

MlpModel model_from_file(const std::string& path) {
  return load_model(read_file(path), kFeatureCount, 15, kClassCount);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Detection and classification of on-screen viewer-age signs";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::enum_<SignClass>(m, "SignClass")
      .value("AGE7", SignClass::age7)
      .value("AGE13", SignClass::age13)
      .value("AGE18", SignClass::age18)
      .value("NONE", SignClass::none)
      .def("__str__", [](SignClass c) { return to_string(c); });
  py::enum_<Detector>(m, "Detector").value("CHT", Detector::cht).value("CE", Detector::ce);
  py::enum_<Corner>(m, "Corner")
      .value("UPPER_LEFT", Corner::upper_left)
      .value("UPPER_RIGHT", Corner::upper_right);
  py::enum_<Polarity>(m, "Polarity")
      .value("POSITIVE", Polarity::positive)
      .value("NEGATIVE", Polarity::negative);
  py::enum_<Background>(m, "Background")
      .value("FLAT", Background::flat)
      .value("GRADIENT", Background::gradient)
      .value("SEEDED_NOISE", Background::seeded_noise)
      .value("CHECKER", Background::checker);

  py::class_<Circle>(m, "Circle")
      .def(py::init<double, double, double>(), py::arg("a0"), py::arg("b0"), py::arg("r0"))
      .def_readwrite("a0", &Circle::a0)
      .def_readwrite("b0", &Circle::b0)
      .def_readwrite("r0", &Circle::r0)
      .def("__repr__", [](const Circle& c) {
        return "Circle(a0=" + std::to_string(c.a0) + ", b0=" + std::to_string(c.b0) +
               ", r0=" + std::to_string(c.r0) + ")";
      });

  // images
  m.def("load_image", [](const std::string& path) -> py::object {
    const AnyImage img = load_pnm(path);
    if (const auto* c = std::get_if<ColorImage>(&img)) return to_array(*c);
    return to_array(std::get<GrayImage>(img));
  }, py::arg("path"), "Read a PPM (H, W, 3) or PGM (H, W) file.");
  m.def("save_image", [](const std::string& path, const U8Array& a) {
    if (a.ndim() == 3) save_pnm(path, color_from(a));
    else save_pnm(path, plane_from<GrayImage>(a));
  }, py::arg("path"), py::arg("image"));
  m.def("to_grayscale", [](const U8Array& a) { return to_array(to_grayscale(color_from(a))); });

  // preprocessing
  m.def("sobel_magnitude", [](const U8Array& gray) {
    return to_array(sobel_magnitude(plane_from<GrayImage>(gray)));
  });
  m.def("extract_candidate", [](const U8Array& gray, double threshold_fraction, std::size_t min_area) {
    const GrayImage g = plane_from<GrayImage>(gray);
    const CandidateObject obj = extract_candidate(
        g, EdgeParams{threshold_fraction}, min_area ? min_area : default_min_area(g.width(), g.height()));
    py::dict out;
    out["mask"] = to_array(obj.mask);
    out["area"] = obj.area;
    out["bbox"] = py::make_tuple(obj.bounding_box.x, obj.bounding_box.y, obj.bounding_box.width,
                                 obj.bounding_box.height);
    out["boundary"] = points_to(obj.boundary);
    return out;
  }, py::arg("gray"), py::arg("threshold_fraction") = 0.2, py::arg("min_area") = 0,
     "Largest filled object of a gray crop; min_area 0 means 0.5% of the crop.");

  // circle detection
  m.def("ce_fit", [](const py::array_t<int, py::array::c_style | py::array::forcecast>& pts) {
    const FitReport r = ce_fit(points_from(pts));
    return py::make_tuple(r.circle, r.residual, r.z);
  }, py::arg("points"), "Algebraic circle fit; returns (circle, residual, z).");
  m.def("cht_known_radius", [](const py::array_t<int, py::array::c_style | py::array::forcecast>& pts,
                               int radius, int width, int height) {
    return cht_known_radius(points_from(pts), radius, width, height);
  }, py::arg("points"), py::arg("radius"), py::arg("width"), py::arg("height"));
  m.def("cht_unknown_radius", [](const py::array_t<int, py::array::c_style | py::array::forcecast>& pts,
                                 int r_min, int r_max, int r_step, int width, int height) {
    return cht_unknown_radius(points_from(pts), HoughParams{r_min, r_max, r_step}, width, height);
  }, py::arg("points"), py::arg("r_min"), py::arg("r_max"), py::arg("r_step") = 1,
     py::arg("width"), py::arg("height"));

  // glyph features
  m.def("glyph_crop", [](const U8Array& mask, const Circle& c) {
    const GlyphCrop g = glyph_crop(plane_from<BinaryImage>(mask), c);
    return py::make_tuple(to_array(g.mask), g.polarity_inverted);
  }, py::arg("mask"), py::arg("circle"), "Returns (80x40 crop, polarity_inverted).");
  m.def("extract_features", [](const U8Array& crop) {
    return features_to(extract_features(plane_from<BinaryImage>(crop)));
  }, py::arg("crop"));

  // classifier
  py::class_<MlpModel>(m, "Model")
      .def_readonly("inputs", &MlpModel::inputs)
      .def_readonly("hidden", &MlpModel::hidden)
      .def_readonly("outputs", &MlpModel::outputs)
      .def("activations", [](const MlpModel& model, const py::array_t<int, py::array::c_style | py::array::forcecast>& f) {
        return mlp_forward(model, features_from(f));
      })
      .def("classify", [](const MlpModel& model, const py::array_t<int, py::array::c_style | py::array::forcecast>& f,
                          double reject) { return classify(model, features_from(f), reject).label; },
           py::arg("features"), py::arg("reject_threshold") = 0.5)
      .def("save", [](const MlpModel& model, const std::string& path) {
        write_file(path, save_model(model));
      })
      .def(py::self == py::self);
  m.def("load_model", &model_from_file, py::arg("path"));

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def_readwrite("detector", &PipelineConfig::detector)
      .def_readwrite("corner_fraction_w", &PipelineConfig::corner_fraction_w)
      .def_readwrite("corner_fraction_h", &PipelineConfig::corner_fraction_h)
      .def_property("edge_threshold",
                    [](const PipelineConfig& c) { return c.edge.threshold_fraction; },
                    [](PipelineConfig& c, double v) { c.edge.threshold_fraction = v; })
      .def_readwrite("min_area_fraction", &PipelineConfig::min_area_fraction)
      .def_readwrite("min_circle_support", &PipelineConfig::min_circle_support)
      .def_readwrite("glyph_radius_inset", &PipelineConfig::glyph_radius_inset)
      .def_readwrite("reject_threshold", &PipelineConfig::reject_threshold)
      .def_readwrite("sampling_period", &PipelineConfig::sampling_period)
      .def("validate", &PipelineConfig::validate);

  m.def("train_model", [](const std::string& corpus_dir, const PipelineConfig& cfg, std::uint64_t seed,
                          double learning_rate, int max_epochs, double target_mse) {
    const CorpusManifest manifest = read_manifest(std::filesystem::path(corpus_dir) / "manifest.jsonl");
    const TrainingSet set = collect_training_set(manifest, directory_loader(corpus_dir), cfg);
    TrainConfig tc;
    tc.rng_seed = seed;
    tc.learning_rate = learning_rate;
    tc.max_epochs = max_epochs;
    tc.target_mse = target_mse;
    TrainResult r;
    {
      py::gil_scoped_release release;
      r = mlp_train(set.samples, tc);
    }
    return py::make_tuple(r.model, r.error_curve, r.converged);
  }, py::arg("corpus_dir"), py::arg("config") = PipelineConfig{}, py::arg("seed") = 1,
     py::arg("learning_rate") = 0.5, py::arg("max_epochs") = 5000, py::arg("target_mse") = 0.01,
     "Train on a corpus's train split; returns (model, error_curve, converged).");

  // pipeline
  py::class_<Detection>(m, "Detection")
      .def(py::init<>())
      .def_readwrite("label", &Detection::label)
      .def_readwrite("circle", &Detection::circle)
      .def_readwrite("corner", &Detection::corner)
      .def_readonly("activations", &Detection::activations)
      .def_readonly("elapsed", &Detection::elapsed)
      .def("to_json", &detection_json);

  m.def("process_frame", [](const U8Array& frame, const PipelineConfig& cfg, const MlpModel& model) {
    const ColorImage img = color_from(frame);
    FrameResult r;
    {
      py::gil_scoped_release release;
      r = process_frame(img, cfg, model);
    }
    return py::make_tuple(r.detection, r.conflict);
  }, py::arg("frame"), py::arg("config"), py::arg("model"),
     "Both corners through the full chain; returns (detection, conflict).");
  m.def("annotate", [](const U8Array& frame, const Detection& d) {
    return to_array(annotate_output(color_from(frame), d));
  }, py::arg("frame"), py::arg("detection"));

  m.def("render_sign_frame", [](SignClass label, Corner corner, double radius, Polarity polarity,
                                Background background, double noise_sigma, std::uint64_t seed) {
    FrameSpec spec;
    spec.background = background;
    spec.corner = corner;
    spec.noise_sigma = noise_sigma;
    spec.seed = seed;
    if (label != SignClass::none) spec.badge = random_badge(label, corner, radius, polarity, seed + 1);
    const RenderedFrame r = render_frame(spec);
    return py::make_tuple(to_array(r.image), r.entry.circle);
  }, py::arg("label"), py::arg("corner") = Corner::upper_left, py::arg("radius") = 30.0,
     py::arg("polarity") = Polarity::positive, py::arg("background") = Background::flat,
     py::arg("noise_sigma") = 0.0, py::arg("seed") = 1,
     "Synthetic 720x576 frame; returns (image, ground-truth circle or None).");

  m.def("generate_corpus", [](const std::string& out_dir, int train_per_class, std::array<int, 3> eval_counts,
                              int train_nc, int eval_nc, double max_sigma, std::uint64_t seed) {
    CorpusParams p;
    p.train_per_class = train_per_class;
    p.eval_counts = eval_counts;
    p.train_nc = train_nc;
    p.eval_nc = eval_nc;
    p.max_sigma = max_sigma;
    p.seed = seed;
    return generate_corpus(p, out_dir).size();
  }, py::arg("out_dir"), py::arg("train_per_class") = 18,
     py::arg("eval_counts") = std::array<int, 3>{43, 27, 41}, py::arg("train_nc") = 18,
     py::arg("eval_nc") = 0, py::arg("max_sigma") = 8.0, py::arg("seed") = 1,
     "Write frames and manifest.jsonl; returns the frame count.");

  m.def("run_benchmark", [](const std::string& corpus_dir, const MlpModel& model, const PipelineConfig& cfg) {
    const CorpusManifest manifest = read_manifest(std::filesystem::path(corpus_dir) / "manifest.jsonl");
    BenchmarkReport r;
    {
      py::gil_scoped_release release;
      r = run_benchmark(manifest, directory_loader(corpus_dir), cfg, model);
    }
    py::list rows;
    for (const BenchmarkRow& row : r.rows) {
      py::dict d;
      d["detector"] = to_string(row.detector);
      d["class"] = to_string(row.label);
      d["n"] = row.count;
      d["mean_s"] = row.mean_seconds;
      d["std_s"] = row.std_seconds;
      d["accuracy_pct"] = row.accuracy_pct;
      rows.append(d);
    }
    return rows;
  }, py::arg("corpus_dir"), py::arg("model"), py::arg("config") = PipelineConfig{});

  m.def("run_stream", [](const std::string& schedule, const PipelineConfig& cfg, const MlpModel& model) {
    const ScheduleFileSource source(schedule);
    std::vector<StreamEvent> events;
    {
      py::gil_scoped_release release;
      events = run_stream(source, cfg, model);
    }
    py::list out;
    for (const StreamEvent& e : events) {
      py::dict d;
      d["t"] = e.t;
      d["detection"] = e.detection;
      d["processing_s"] = e.processing_seconds;
      d["deadline_met"] = e.deadline_met;
      out.append(d);
    }
    return out;
  }, py::arg("schedule"), py::arg("config"), py::arg("model"),
     "Sample a schedule.jsonl every config.sampling_period seconds.");
}
