#include "tdict_cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "tdict/blur.hpp"
#include "tdict/deblur.hpp"
#include "tdict/dict_learn.hpp"
#include "tdict/errors.hpp"
#include "tdict/image.hpp"
#include "tdict/metrics.hpp"
#include "tdict/mrnsd.hpp"
#include "tdict/parallel.hpp"
#include "tdict/patch.hpp"
#include "tdict/tensor_io.hpp"
#include "tdict/tproduct.hpp"

namespace tdict::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string output_dir;
  int verbosity = 0;
  bool quiet = false;
};

struct Context {
  const Globals& g;
  std::ostream& out;
  std::ostream& err;

  fs::path output(const std::string& path) const {
    fs::path p(path);
    if (g.output_dir.empty() || p.is_absolute()) return p;
    return fs::path(g.output_dir) / p;
  }

  void log(const std::string& msg) const {
    if (!g.quiet) out << msg << '\n';
  }
  void debug(const std::string& msg) const {
    if (g.verbosity > 0 && !g.quiet) err << msg << '\n';
  }
};

fs::path sidecar_of(const fs::path& artifact) { return fs::path(artifact.string() + ".json"); }

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << j.dump(2) << '\n';
  if (!f) throw IoError("failed writing " + path.string());
}

std::optional<json> read_sidecar(const fs::path& artifact) {
  const fs::path path = sidecar_of(artifact);
  if (!fs::exists(path)) return std::nullopt;
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": invalid JSON sidecar: " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::vector<ImageGray> channels_of(const AnyImage& img) {
  if (const auto* g = std::get_if<ImageGray>(&img)) return {*g};
  const auto& rgb = std::get<ImageRgb>(img);
  return {rgb.channels[0], rgb.channels[1], rgb.channels[2]};
}

AnyImage pad_image(const AnyImage& img, Index p, Index q) {
  if (const auto* g = std::get_if<ImageGray>(&img)) return pad_to_multiple(*g, p, q);
  ImageRgb rgb = std::get<ImageRgb>(img);
  for (auto& c : rgb.channels) c = pad_to_multiple(c, p, q);
  return rgb;
}

Index image_rows(const AnyImage& img) {
  return std::visit([](const auto& i) { return static_cast<Index>(i.rows()); }, img);
}
Index image_cols(const AnyImage& img) {
  return std::visit([](const auto& i) { return static_cast<Index>(i.cols()); }, img);
}

// Reads an image with the failing path attached to any error.
AnyImage load_image(const fs::path& path) {
  try {
    return read_pnm(path);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

json history_json(const SolveReport& r) {
  return {{"iterations", r.iterations},
          {"converged", r.converged},
          {"stagnated", r.stagnated},
          {"seconds", r.seconds},
          {"final_objective", r.history.empty() ? 0.0 : r.history.back().objective}};
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  std::vector<std::string> images;
  std::string manifest;
  Index p = 8;
  Index q = 8;
  Index s = 0;
  double lambda = 1e-2;
  double rho = 1.0;
  int iters = 300;
  double tol = 1e-4;
  bool pad = false;
  std::string out = "dictionary.tdct";
  std::string history;
};

int cmd_train(const Context& ctx, const TrainOptions& o) {
  std::vector<std::string> paths = o.images;
  if (!o.manifest.empty()) {
    std::ifstream f(o.manifest);
    if (!f) throw IoError("cannot read manifest " + o.manifest);
    const fs::path base = fs::path(o.manifest).parent_path();
    std::string line;
    while (std::getline(f, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      const auto last = line.find_last_not_of(" \t\r");
      fs::path p(line.substr(first, last - first + 1));
      paths.push_back((p.is_absolute() ? p : base / p).string());
    }
  }
  if (paths.empty()) throw ConfigError("train: no training images given (use --images or --manifest)");
  const Index s = o.s > 0 ? o.s : 2 * o.p;

  std::vector<ImageGray> images;
  for (const auto& path : paths) {
    AnyImage img = load_image(path);
    if (o.pad) img = pad_image(img, o.p, o.q);
    if (image_rows(img) % o.p != 0 || image_cols(img) % o.q != 0) {
      throw ShapeError(path + ": " + std::to_string(image_rows(img)) + "x" + std::to_string(image_cols(img)) +
                       " is not divisible into " + std::to_string(o.p) + "x" + std::to_string(o.q) +
                       " patches (use --pad)");
    }
    for (auto& c : channels_of(img)) images.push_back(std::move(c));
  }
  const Tensor3 y = build_training_tensor(images, o.p, o.q);
  ctx.debug("training tensor " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()) + "x" +
            std::to_string(y.tubes()));

  AdmmOptions opt;
  opt.atoms = s;
  opt.lambda = o.lambda;
  opt.rho = o.rho;
  opt.max_iters = o.iters;
  opt.tol = o.tol;
  opt.seed = ctx.g.seed;
  const AdmmResult res = admm_learn(y, opt);

  const fs::path out = ctx.output(o.out);
  ensure_parent(out);
  write_dictionary(out, res.dictionary);
  json meta = {{"command", "train"},
               {"images", paths},
               {"p", o.p},
               {"q", o.q},
               {"s", s},
               {"lambda", o.lambda},
               {"rho", o.rho},
               {"max_iters", o.iters},
               {"tol", o.tol},
               {"seed", ctx.g.seed},
               {"pad", o.pad},
               {"iterations", res.iterations},
               {"converged", res.converged},
               {"relative_fit", res.relative_fit},
               {"seconds", res.seconds}};
  write_json(sidecar_of(out), meta);
  if (!o.history.empty()) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "iter,objective,dict_residual,coeff_residual\n";
    for (const auto& h : res.history) {
      csv << h.iter << ',' << h.objective << ',' << h.dict_residual << ',' << h.coeff_residual << '\n';
    }
    write_text(ctx.output(o.history), csv.str());
  }
  ctx.log("dictionary " + std::to_string(o.p) + "x" + std::to_string(s) + "x" + std::to_string(o.q) + " -> " +
          out.string() + " (" + std::to_string(res.iterations) + " iterations, relative fit " +
          std::to_string(res.relative_fit) + ")");
  return kOk;
}

// ---------------------------------------------------------------------------
// encode

struct EncodeOptions {
  std::string image;
  std::string dict;
  double lambda = 0.0;
  int iters = 200;
  bool dense = false;
  bool pad = false;
  std::string out = "coefficients.tcof";
  std::string history;
};

int cmd_encode(const Context& ctx, const EncodeOptions& o) {
  const Tensor3 d = read_dictionary(o.dict);
  const Index p = d.rows();
  const Index q = d.tubes();
  const AnyImage original = load_image(o.image);
  const AnyImage img = o.pad ? pad_image(original, p, q) : original;
  const Index rows = image_rows(img);
  const Index cols = image_cols(img);
  if (rows % p != 0 || cols % q != 0) {
    throw ShapeError(o.image + ": " + std::to_string(rows) + "x" + std::to_string(cols) +
                     " image does not tile into the dictionary's " + std::to_string(p) + "x" + std::to_string(q) +
                     " patches (expected rows divisible by p=" + std::to_string(p) + " and cols by q=" +
                     std::to_string(q) + "; use --pad)");
  }
  const bool color = std::holds_alternative<ImageRgb>(img);
  const Tensor3 b = color ? patchify_color(std::get<ImageRgb>(img), p, q) : patchify(std::get<ImageGray>(img), p, q);

  MrnsdConfig cfg;
  cfg.max_iters = o.iters;
  cfg.lambda = o.lambda;
  const Tensor3 c0 = initial_guess(d, b, cfg.floor);
  const TensorSolution sol = o.lambda > 0.0 ? mrnsd_sparse(d, b, c0, cfg) : mrnsd(d, b, c0, cfg);
  const double err = rel_err(tprod(d, sol.coefficients), b);
  const CompressionReport report = compression_report(sol.coefficients, d, b.size(), err);

  const fs::path out = ctx.output(o.out);
  ensure_parent(out);
  if (o.dense) {
    write_t3d1(out, sol.coefficients);
  } else {
    write_coefficients(out, sol.coefficients);
  }
  json meta = {{"command", "encode"},
               {"image", o.image},
               {"dictionary", o.dict},
               {"format", o.dense ? "T3D1" : "TCOF1"},
               {"rows", rows},
               {"cols", cols},
               {"original_rows", image_rows(original)},
               {"original_cols", image_cols(original)},
               {"channels", color ? 3 : 1},
               {"p", p},
               {"q", q},
               {"s", d.cols()},
               {"lambda", o.lambda},
               {"max_iters", o.iters},
               {"seed", ctx.g.seed},
               {"solver", history_json(sol.report)},
               {"compression", json::parse(report.to_json())}};
  write_json(sidecar_of(out), meta);
  if (!o.history.empty()) write_text(ctx.output(o.history), sol.report.to_csv());
  ctx.out << report.to_json() << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// decode

struct DecodeOptions {
  std::string coeffs;
  std::string dict;
  Index rows = 0;
  Index cols = 0;
  int channels = 0;
  bool keep_padding = false;
  std::string out = "decoded.pgm";
};

int cmd_decode(const Context& ctx, const DecodeOptions& o) {
  const Tensor3 d = read_dictionary(o.dict);
  const Tensor3 c = read_tensor_any(o.coeffs);
  if (c.rows() != d.cols() || c.tubes() != d.tubes()) {
    throw ShapeError("decode: coefficients are " + std::to_string(c.rows()) + "x" + std::to_string(c.cols()) + "x" +
                     std::to_string(c.tubes()) + " but the dictionary is " + std::to_string(d.rows()) + "x" +
                     std::to_string(d.cols()) + "x" + std::to_string(d.tubes()));
  }
  const Index p = d.rows();
  const Index q = d.tubes();
  const auto meta = read_sidecar(o.coeffs);

  int channels = o.channels;
  Index rows = o.rows;
  Index cols = o.cols;
  Index crop_rows = 0;
  Index crop_cols = 0;
  if (meta) {
    if (channels == 0) channels = meta->value("channels", 1);
    if (rows == 0) rows = meta->value("rows", Index{0});
    if (cols == 0) cols = meta->value("cols", Index{0});
    crop_rows = meta->value("original_rows", Index{0});
    crop_cols = meta->value("original_cols", Index{0});
  }
  if (channels == 0) channels = 1;
  if (channels != 1 && channels != 3) throw ConfigError("decode: channels must be 1 or 3");
  if (c.cols() % channels != 0) throw ShapeError("decode: slice count is not divisible by the channel count");
  const Index m = c.cols() / channels;

  if (rows == 0 && cols == 0) {
    const auto side = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(m))));
    if (side * side != m) {
      throw ShapeError("decode: " + std::to_string(m) + " patches do not form a square grid; pass --rows/--cols");
    }
    rows = side * p;
    cols = side * q;
  } else if (rows == 0) {
    rows = m / (cols / q) * p;
  } else if (cols == 0) {
    cols = m / (rows / p) * q;
  }
  const PatchGrid grid = PatchGrid::for_image(rows, cols, p, q);
  if (grid.patches() != m) {
    throw ShapeError("decode: a " + std::to_string(rows) + "x" + std::to_string(cols) + " image has " +
                     std::to_string(grid.patches()) + " patches but the coefficients hold " + std::to_string(m));
  }

  const Tensor3 x = tprod(d, c);
  const bool crop = !o.keep_padding && crop_rows > 0 && crop_cols > 0 && crop_rows <= rows && crop_cols <= cols;
  const fs::path out = ctx.output(o.out);
  ensure_parent(out);
  std::vector<Eigen::MatrixXd> planes;
  if (channels == 1) {
    planes.push_back(depatchify(x, grid));
  } else {
    const ImageRgb rgb = depatchify_color(x, grid);
    planes.assign(rgb.channels.begin(), rgb.channels.end());
  }
  if (crop) {
    for (auto& ch : planes) ch = Eigen::MatrixXd(ch.topLeftCorner(crop_rows, crop_cols));
  }
  if (out.extension() == ".t3d") {
    // Unquantized pixels, one frontal slice per channel.
    Tensor3 raw(planes[0].rows(), planes[0].cols(), static_cast<Index>(planes.size()));
    for (std::size_t k = 0; k < planes.size(); ++k) raw.face(static_cast<Index>(k)) = planes[k];
    write_t3d1(out, raw);
  } else if (channels == 1) {
    write_pgm(out, planes[0]);
  } else {
    write_ppm(out, ImageRgb{{planes[0], planes[1], planes[2]}});
  }
  ctx.log("decoded " + std::to_string(rows) + "x" + std::to_string(cols) + " -> " + out.string());
  return kOk;
}

// ---------------------------------------------------------------------------
// degrade

struct DegradeOptions {
  std::string image;
  Index bw = 4;
  double sigma = 4.0;
  std::string boundary = "reflexive";
  Index margin = -1;
  double level = 0.01;
  bool standard_psf = false;
  std::string out = "degraded.t3d";
  std::string preview;
};

Psf make_psf(Index bw, double sigma, bool standard) {
  return standard ? standard_gaussian_psf(bw, sigma) : gaussian_psf(bw, sigma);
}

int cmd_degrade(const Context& ctx, const DegradeOptions& o) {
  const AnyImage any = load_image(o.image);
  if (!std::holds_alternative<ImageGray>(any)) throw ShapeError(o.image + ": degrade expects a grayscale image");
  const ImageGray& img = std::get<ImageGray>(any);
  const Boundary mode = o.boundary == "trimmed" ? Boundary::trimmed : Boundary::reflexive;
  const Index margin = mode == Boundary::trimmed ? (o.margin >= 0 ? o.margin : o.bw) : 0;
  if (mode == Boundary::reflexive && o.margin > 0) throw ConfigError("degrade: --margin requires --boundary trimmed");

  const BlurOperator op(mode, make_psf(o.bw, o.sigma, o.standard_psf), img.rows(), img.cols(), margin);
  const Eigen::VectorXd clean = op.apply(Eigen::Map<const Eigen::VectorXd>(img.data(), img.size()));
  const Eigen::VectorXd noisy = add_noise(clean, o.level, ctx.g.seed);

  Tensor3 data(op.output_rows(), op.output_cols(), 1);
  std::copy(noisy.begin(), noisy.end(), data.data().begin());
  const fs::path out = ctx.output(o.out);
  ensure_parent(out);
  write_t3d1(out, data);
  json meta = {{"command", "degrade"},
               {"image", o.image},
               {"image_rows", img.rows()},
               {"image_cols", img.cols()},
               {"data_rows", op.output_rows()},
               {"data_cols", op.output_cols()},
               {"bw", o.bw},
               {"sigma", o.sigma},
               {"psf", o.standard_psf ? "standard" : "default"},
               {"boundary", o.boundary},
               {"margin", margin},
               {"level", o.level},
               {"seed", ctx.g.seed}};
  write_json(sidecar_of(out), meta);
  if (!o.preview.empty()) {
    const fs::path preview = ctx.output(o.preview);
    ensure_parent(preview);
    write_pgm(preview, Eigen::Map<const Eigen::MatrixXd>(noisy.data(), op.output_rows(), op.output_cols()));
  }
  ctx.log("degraded data " + std::to_string(op.output_rows()) + "x" + std::to_string(op.output_cols()) + " -> " +
          out.string());
  return kOk;
}

// ---------------------------------------------------------------------------
// deblur

struct DeblurCliOptions {
  std::string bundle;
  std::vector<std::string> dicts;
  std::string mode = "tensor";
  double lambda_reg = 0.0;
  std::string reg_mode = "patch_jump";
  int iters = 2000;
  std::string truth;
  std::vector<double> combine;
  std::string out = "deblurred.pgm";
  std::string history;
  std::string curve;
};

int cmd_deblur(const Context& ctx, const DeblurCliOptions& o) {
  const auto meta = read_sidecar(o.bundle);
  if (!meta) throw FormatError(o.bundle + ": missing sidecar " + sidecar_of(o.bundle).string());
  const Tensor3 data = read_t3d1(o.bundle);
  Index rows = 0;
  Index cols = 0;
  Index bw = 0;
  double sigma = 0.0;
  Index margin = 0;
  std::string boundary;
  std::string psf_kind;
  try {
    rows = meta->at("image_rows").get<Index>();
    cols = meta->at("image_cols").get<Index>();
    bw = meta->at("bw").get<Index>();
    sigma = meta->at("sigma").get<double>();
    margin = meta->at("margin").get<Index>();
    boundary = meta->at("boundary").get<std::string>();
    psf_kind = meta->value("psf", std::string("default"));
  } catch (const json::exception& e) {
    throw FormatError(sidecar_of(o.bundle).string() + ": " + e.what());
  }
  const Boundary mode = boundary == "trimmed" ? Boundary::trimmed : Boundary::reflexive;
  auto blur = std::make_shared<BlurOperator>(mode, make_psf(bw, sigma, psf_kind == "standard"), rows, cols, margin);
  if (data.size() != blur->rows()) throw FormatError(o.bundle + ": data length does not match its sidecar");
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(data.data().data(), data.size());

  DeblurOptions opt;
  opt.solver.max_iters = o.iters;
  if (!o.truth.empty()) {
    const AnyImage t = load_image(o.truth);
    if (!std::holds_alternative<ImageGray>(t)) throw ShapeError(o.truth + ": truth must be grayscale");
    opt.truth = std::get<ImageGray>(t);
    if (opt.truth->rows() != rows || opt.truth->cols() != cols) {
      throw ShapeError(o.truth + ": truth is " + std::to_string(opt.truth->rows()) + "x" +
                       std::to_string(opt.truth->cols()) + " but the bundle image is " + std::to_string(rows) + "x" +
                       std::to_string(cols));
    }
  }
  const RegularizerMode reg_mode = o.reg_mode == "full" ? RegularizerMode::full : RegularizerMode::patch_jump;

  std::vector<DeblurResult> runs;
  json run_meta = json::array();
  if (o.mode == "matrix") {
    if (!o.dicts.empty()) throw ConfigError("deblur: --dict is not used in matrix mode");
    std::shared_ptr<const PatchRegularizer> reg;
    if (o.lambda_reg > 0.0) {
      reg = std::make_shared<PatchRegularizer>(RegularizerMode::full, PatchGrid::for_image(rows, cols, 1, 1),
                                               o.lambda_reg);
    }
    runs.push_back(deblur_matrix(b, blur, rows, cols, reg, opt));
    run_meta.push_back({{"mode", "matrix"}, {"solver", history_json(runs.back().report)}});
  } else {
    if (o.dicts.empty()) throw ConfigError("deblur: tensor mode requires --dict");
    for (const auto& path : o.dicts) {
      const Tensor3 d = read_dictionary(path);
      const PatchGrid grid = PatchGrid::for_image(rows, cols, d.rows(), d.tubes());
      std::shared_ptr<const PatchRegularizer> reg;
      if (o.lambda_reg > 0.0) reg = std::make_shared<PatchRegularizer>(reg_mode, grid, o.lambda_reg);
      runs.push_back(deblur_tensor(b, blur, d, grid, reg, opt));
      run_meta.push_back({{"mode", "tensor"}, {"dictionary", path}, {"solver", history_json(runs.back().report)}});
      ctx.debug("reconstructed with " + path);
    }
  }

  std::vector<double> weights = o.combine;
  if (weights.empty()) weights.assign(runs.size(), 1.0 / static_cast<double>(runs.size()));
  if (weights.size() != runs.size()) {
    throw ConfigError("deblur: --combine has " + std::to_string(weights.size()) + " weights for " +
                      std::to_string(runs.size()) + " reconstructions");
  }
  std::vector<ImageGray> images;
  for (const auto& r : runs) images.push_back(r.image);
  const ImageGray result = runs.size() == 1 && weights[0] == 1.0 ? images[0] : combine(images, weights);

  const fs::path out = ctx.output(o.out);
  ensure_parent(out);
  write_pgm(out, result);
  json summary = {{"command", "deblur"},
                  {"bundle", o.bundle},
                  {"mode", o.mode},
                  {"lambda_reg", o.lambda_reg},
                  {"reg_mode", o.reg_mode},
                  {"max_iters", o.iters},
                  {"weights", weights},
                  {"seed", ctx.g.seed},
                  {"runs", run_meta}};
  if (opt.truth) {
    const ImageGray clamped = result.cwiseMax(0.0).cwiseMin(1.0);
    summary["rel_err"] = rel_err(result, *opt.truth);
    summary["ssim"] = ssim(clamped, *opt.truth);
  }
  write_json(sidecar_of(out), summary);
  if (!o.history.empty()) write_text(ctx.output(o.history), runs.front().report.to_csv());
  if (!o.curve.empty()) {
    if (!opt.truth) throw ConfigError("deblur: --curve requires --truth");
    write_text(ctx.output(o.curve), runs.front().curve_csv());
  }
  ctx.log("reconstruction -> " + out.string() +
          (opt.truth ? " (rel err " + std::to_string(summary["rel_err"].get<double>()) + ")" : std::string()));
  return kOk;
}

// ---------------------------------------------------------------------------
// metrics

struct MetricsOptions {
  std::string a;
  std::string b;
  std::string out;
};

int cmd_metrics(const Context& ctx, const MetricsOptions& o) {
  const auto a = channels_of(load_image(o.a));
  const auto b = channels_of(load_image(o.b));
  if (a.size() != b.size() || a[0].rows() != b[0].rows() || a[0].cols() != b[0].cols()) {
    throw ShapeError("metrics: " + o.a + " is " + std::to_string(a[0].rows()) + "x" + std::to_string(a[0].cols()) +
                     "x" + std::to_string(a.size()) + " but " + o.b + " is " + std::to_string(b[0].rows()) + "x" +
                     std::to_string(b[0].cols()) + "x" + std::to_string(b.size()));
  }
  double num = 0.0;
  double den = 0.0;
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    num += (a[c] - b[c]).squaredNorm();
    den += b[c].squaredNorm();
    s += ssim(a[c], b[c]);
  }
  if (den == 0.0) throw ShapeError("metrics: reference image " + o.b + " is all zero");
  const json j = {{"rel_err", std::sqrt(num / den)}, {"ssim", s / static_cast<double>(a.size())}};
  ctx.out << j.dump() << '\n';
  if (!o.out.empty()) write_json(ctx.output(o.out), j);
  return kOk;
}

int report_error(std::ostream& err, const char* kind, const std::exception& e, int code) {
  err << "tdict: " << kind << ": " << e.what() << '\n';
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-negative tensor patch-dictionary imaging", "tdict"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every randomized step")->capture_default_str();
  app.add_option("--threads", g.threads, "Thread cap for facewise parallel work (0 = default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--output-dir", g.output_dir, "Directory that relative output paths are resolved against");
  app.add_flag("-v,--verbose", g.verbosity, "More diagnostics on stderr");
  app.add_flag("--quiet", g.quiet, "Suppress progress messages");

  TrainOptions train;
  auto* t = app.add_subcommand("train", "Learn a non-negative tensor dictionary");
  t->add_option("--images", train.images, "Training images (PGM/PPM)");
  t->add_option("--manifest", train.manifest, "File listing training images, one per line");
  t->add_option("-p,--patch-rows", train.p, "Patch rows")->check(CLI::PositiveNumber)->capture_default_str();
  t->add_option("-q,--patch-cols", train.q, "Patch columns (tube length)")->check(CLI::PositiveNumber)->capture_default_str();
  t->add_option("-s,--atoms", train.s, "Dictionary width (default 2p)")->check(CLI::PositiveNumber);
  t->add_option("--lambda", train.lambda, "Sparsity weight")->check(CLI::NonNegativeNumber)->capture_default_str();
  t->add_option("--rho", train.rho, "ADMM penalty")->check(CLI::PositiveNumber)->capture_default_str();
  t->add_option("--iters", train.iters, "Maximum ADMM iterations")->check(CLI::PositiveNumber)->capture_default_str();
  t->add_option("--tol", train.tol, "Stopping tolerance")->check(CLI::NonNegativeNumber)->capture_default_str();
  t->add_flag("--pad", train.pad, "Replicate-pad images to a multiple of the patch size");
  t->add_option("-o,--out", train.out, "Dictionary file (TDCT1)")->capture_default_str();
  t->add_option("--history", train.history, "CSV of per-iteration ADMM diagnostics");

  EncodeOptions encode;
  auto* e = app.add_subcommand("encode", "Compute non-negative coefficients of an image");
  e->add_option("image", encode.image, "Image (PGM/PPM)")->required();
  e->add_option("-d,--dict", encode.dict, "Dictionary file")->required();
  e->add_option("--lambda", encode.lambda, "Sparsity weight")->check(CLI::NonNegativeNumber)->capture_default_str();
  e->add_option("--iters", encode.iters, "MRNSD iterations")->check(CLI::NonNegativeNumber)->capture_default_str();
  e->add_flag("--dense", encode.dense, "Store all coefficients as T3D1");
  e->add_flag("--pad", encode.pad, "Replicate-pad the image to a multiple of the patch size");
  e->add_option("-o,--out", encode.out, "Coefficient file")->capture_default_str();
  e->add_option("--history", encode.history, "CSV of per-iteration solver diagnostics");

  DecodeOptions decode;
  auto* dc = app.add_subcommand("decode", "Reconstruct an image from coefficients");
  dc->add_option("coeffs", decode.coeffs, "Coefficient file (TCOF1 or T3D1)")->required();
  dc->add_option("-d,--dict", decode.dict, "Dictionary file")->required();
  dc->add_option("--rows", decode.rows, "Image rows when no sidecar is present")->check(CLI::PositiveNumber);
  dc->add_option("--cols", decode.cols, "Image columns when no sidecar is present")->check(CLI::PositiveNumber);
  dc->add_option("--channels", decode.channels, "1 or 3 when no sidecar is present")->check(CLI::IsMember({1, 3}));
  dc->add_flag("--keep-padding", decode.keep_padding, "Do not crop padding added by encode --pad");
  dc->add_option("-o,--out", decode.out, "Output image (PGM/PPM, or unquantized T3D1 for a .t3d name)")->capture_default_str();

  DegradeOptions degrade;
  auto* dg = app.add_subcommand("degrade", "Blur an image and add noise");
  dg->add_option("image", degrade.image, "Grayscale image")->required();
  dg->add_option("--bw", degrade.bw, "PSF bandwidth")->check(CLI::PositiveNumber)->capture_default_str();
  dg->add_option("--sigma", degrade.sigma, "PSF width")->check(CLI::PositiveNumber)->capture_default_str();
  dg->add_option("--boundary", degrade.boundary, "reflexive or trimmed")
      ->check(CLI::IsMember({"reflexive", "trimmed"}))
      ->capture_default_str();
  dg->add_option("--margin", degrade.margin, "Crop per side in trimmed mode (default bw)");
  dg->add_option("--level", degrade.level, "Relative noise level")->check(CLI::NonNegativeNumber)->capture_default_str();
  dg->add_flag("--standard-psf", degrade.standard_psf, "Use exp(-k^2 / (2 sigma^2))");
  dg->add_option("-o,--out", degrade.out, "Data bundle (T3D1 plus JSON sidecar)")->capture_default_str();
  dg->add_option("--preview", degrade.preview, "Also write the data as a PGM image");

  DeblurCliOptions deblur;
  auto* db = app.add_subcommand("deblur", "Reconstruct an image from a degraded bundle");
  db->add_option("bundle", deblur.bundle, "Data bundle written by degrade")->required();
  db->add_option("-d,--dict", deblur.dicts, "Dictionary; repeat to combine several reconstructions");
  db->add_option("--mode", deblur.mode, "tensor or matrix")
      ->check(CLI::IsMember({"tensor", "matrix"}))
      ->capture_default_str();
  db->add_option("--lambda-reg", deblur.lambda_reg, "Boundary regularization weight")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  db->add_option("--reg-mode", deblur.reg_mode, "full or patch_jump")
      ->check(CLI::IsMember({"full", "patch_jump"}))
      ->capture_default_str();
  db->add_option("--iters", deblur.iters, "MRNSD iterations")->check(CLI::NonNegativeNumber)->capture_default_str();
  db->add_option("--truth", deblur.truth, "Ground truth image for error reporting");
  db->add_option("--combine", deblur.combine, "Weights for combining reconstructions")->delimiter(',');
  db->add_option("-o,--out", deblur.out, "Output image")->capture_default_str();
  db->add_option("--history", deblur.history, "CSV of per-iteration solver diagnostics");
  db->add_option("--curve", deblur.curve, "CSV of per-iteration rel err against --truth");

  MetricsOptions metrics;
  auto* m = app.add_subcommand("metrics", "Relative error and SSIM of two images");
  m->add_option("a", metrics.a, "Test image")->required();
  m->add_option("b", metrics.b, "Reference image")->required();
  m->add_option("-o,--out", metrics.out, "Also write the JSON to this file");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("tdict");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& pe) {
    err << "tdict: " << pe.what() << '\n';
    if (!app.get_subcommands().empty()) err << "run 'tdict " << app.get_subcommands().front()->get_name() << " --help' for usage\n";
    return kUsage;
  }

  if (g.threads > 0) set_max_threads(g.threads);
  const Context ctx{g, out, err};
  try {
    if (*t) return cmd_train(ctx, train);
    if (*e) return cmd_encode(ctx, encode);
    if (*dc) return cmd_decode(ctx, decode);
    if (*dg) return cmd_degrade(ctx, degrade);
    if (*db) return cmd_deblur(ctx, deblur);
    if (*m) return cmd_metrics(ctx, metrics);
    return kUsage;
  } catch (const ConfigError& ex) {
    return report_error(err, "invalid arguments", ex, kUsage);
  } catch (const NumericError& ex) {
    return report_error(err, "numerical failure", ex, kNumeric);
  } catch (const ShapeError& ex) {
    return report_error(err, "shape mismatch", ex, kData);
  } catch (const FormatError& ex) {
    return report_error(err, "bad file", ex, kData);
  } catch (const IoError& ex) {
    return report_error(err, "i/o error", ex, kData);
  } catch (const fs::filesystem_error& ex) {
    return report_error(err, "i/o error", ex, kData);
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace tdict::cli
