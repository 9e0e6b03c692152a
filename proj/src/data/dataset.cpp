#include "nmt/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "nmt/binary_io.hpp"
#include "nmt/noise/noise.hpp"
#include "nmt/random.hpp"

namespace nmt::data {

std::string to_string(Generator g) { return g == Generator::blobs ? "blobs" : "patterns"; }

Generator generator_from_string(const std::string& s) {
  if (s == "blobs") return Generator::blobs;
  if (s == "patterns") return Generator::patterns;
  throw std::invalid_argument("unknown generator '" + s + "' (expected blobs|patterns)");
}

void NoiseConfig::validate() const {
  for (double r : discrete_rates)
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("noise: flip rate must lie in [0, 1)");
  for (double r : continuous_rates)
    if (!(r >= 0.0 && r < 1.0))
      throw std::invalid_argument("noise: outlier rate must lie in [0, 1)");
}

std::size_t DatasetSpec::feature_dim() const {
  return generator == Generator::blobs ? input_dim : side * side;
}

DatasetSpec DatasetSpec::resolved() const {
  DatasetSpec s = *this;
  noise.validate();
  if (classes < 2) throw std::invalid_argument("dataset: need at least 2 classes");
  if (n_train < classes || n_test < classes)
    throw std::invalid_argument("dataset: n_train and n_test must be >= classes");
  if (anchor_jitter < 0.0 || blob_spread < 0.0 || pattern_noise < 0.0)
    throw std::invalid_argument("dataset: spreads must be non-negative");
  if (generator == Generator::blobs) {
    if (input_dim == 0) throw std::invalid_argument("dataset: input_dim must be positive");
    if (classes > input_dim)
      throw std::invalid_argument("dataset: cannot place " + std::to_string(classes) +
                                  " separated centres in " + std::to_string(input_dim) + " dims");
    if (center_distance < 6.0 * blob_spread)
      throw std::invalid_argument("dataset: centre distance must be >= 6 * blob_spread");
  } else {
    if (side < 8) throw std::invalid_argument("dataset: pattern side length must be >= 8");
    if (classes > kPatternTemplateCount)
      throw std::invalid_argument("dataset: only " + std::to_string(kPatternTemplateCount) +
                                  " pattern templates available");
  }
  if (!noise.continuous_rates.empty() && continuous_dim == 0)
    throw std::invalid_argument("dataset: continuous noise configured without continuous labels");

  const std::size_t d = continuous_dim;
  if (d > 0) {
    if (s.class_anchors.empty()) {
      s.class_anchors.assign(classes * d, 0.0);
      for (std::size_t c = 0; c < classes; ++c) {
        if (d == 1) {
          s.class_anchors[c] = -0.8 + 1.6 * static_cast<double>(c) / static_cast<double>(classes - 1);
        } else {
          const double a = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(classes);
          s.class_anchors[c * d] = 0.7 * std::cos(a);
          s.class_anchors[c * d + 1] = 0.7 * std::sin(a);
        }
      }
    }
    if (s.class_anchors.size() != classes * d)
      throw std::invalid_argument("dataset: class_anchors must hold classes x continuous_dim values");
    for (double v : s.class_anchors)
      if (v < -1.0 || v > 1.0) throw std::invalid_argument("dataset: anchors must lie in [-1, 1]");
    for (std::size_t a = 0; a < classes; ++a)
      for (std::size_t b = a + 1; b < classes; ++b) {
        double dist2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double diff = s.class_anchors[a * d + j] - s.class_anchors[b * d + j];
          dist2 += diff * diff;
        }
        if (std::sqrt(dist2) < 4.0 * anchor_jitter || dist2 == 0.0)
          throw std::invalid_argument("dataset: anchors closer than 4 * anchor_jitter");
      }
  } else {
    s.class_anchors.clear();
  }
  return s;
}

std::vector<double> blob_centers(const DatasetSpec& spec) {
  const double r = spec.center_distance / std::numbers::sqrt2;
  std::vector<double> c(spec.classes * spec.input_dim, 0.0);
  for (std::size_t k = 0; k < spec.classes; ++k) c[k * spec.input_dim + k] = r;
  return c;
}

std::vector<double> pattern_template(std::size_t cls, std::size_t side) {
  if (cls >= kPatternTemplateCount) throw std::invalid_argument("no template for class");
  std::vector<double> img(side * side, 0.0);
  const std::size_t h = side / 2;
  const std::size_t q = side / 4;
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c) {
      bool on = false;
      switch (cls) {
        case 0: on = (r / 2) % 2 == 0; break;                       // horizontal stripes
        case 1: on = (c / 2) % 2 == 0; break;                       // vertical stripes
        case 2: on = ((r / 2) + (c / 2)) % 2 == 0; break;           // checkerboard
        case 3: on = ((r + c) / 2) % 2 == 0; break;                 // diagonal stripes
        case 4: on = ((r + side - c) / 2) % 2 == 0; break;          // anti-diagonal stripes
        case 5: on = r < h && c < h; break;                         // corners
        case 6: on = r < h && c >= h; break;
        case 7: on = r >= h && c < h; break;
        case 8: on = r >= h && c >= h; break;
        case 9: on = r >= q && r < side - q && c >= q && c < side - q; break;  // centre block
        case 10: on = r < 2 || c < 2 || r >= side - 2 || c >= side - 2; break;  // frame
        case 11: on = (r >= h - 1 && r <= h) || (c >= h - 1 && c <= h); break;  // cross
        default: break;
      }
      img[r * side + c] = on ? 1.0 : 0.0;
    }
  return img;
}

namespace {

void fill_continuous(const DatasetSpec& s, Split& sp, Rng& rng) {
  const std::size_t d = s.continuous_dim;
  sp.cont_dim = d;
  sp.clean_cont.assign(sp.n * d, 0.0);
  std::normal_distribution<double> jitter(0.0, 1.0);
  for (std::size_t i = 0; i < sp.n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double v = s.class_anchors[static_cast<std::size_t>(sp.clean_class[i]) * d + j] +
                       s.anchor_jitter * jitter(rng);
      sp.clean_cont[i * d + j] = std::clamp(v, -1.0, 1.0);
    }
}

Split clean_split(const DatasetSpec& s, std::size_t n, Rng& rng) {
  Split sp;
  sp.n = n;
  sp.dim = s.feature_dim();
  sp.x.assign(n * sp.dim, 0.0);
  sp.clean_class.resize(n);
  std::uniform_int_distribution<int> cls(0, static_cast<int>(s.classes) - 1);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::vector<double>> means(s.classes);
  double spread = s.blob_spread;
  if (s.generator == Generator::blobs) {
    const auto centers = blob_centers(s);
    for (std::size_t c = 0; c < s.classes; ++c)
      means[c].assign(centers.begin() + static_cast<std::ptrdiff_t>(c * sp.dim),
                      centers.begin() + static_cast<std::ptrdiff_t>((c + 1) * sp.dim));
  } else {
    for (std::size_t c = 0; c < s.classes; ++c) means[c] = pattern_template(c, s.side);
    spread = s.pattern_noise;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const int c = cls(rng);
    sp.clean_class[i] = c;
    const auto& mu = means[static_cast<std::size_t>(c)];
    for (std::size_t j = 0; j < sp.dim; ++j) {
      double v = mu[j] + spread * normal(rng);
      if (s.generator == Generator::patterns) v = std::clamp(v, 0.0, 1.0);
      sp.x[i * sp.dim + j] = v;
    }
  }
  if (s.continuous_dim > 0) fill_continuous(s, sp, rng);
  return sp;
}

void apply_noise(const DatasetSpec& s, Split& sp) {
  for (std::size_t k = 0; k < s.noise.discrete_rates.size(); ++k) {
    Rng rng = derive_rng(s.seed, "noise.discrete." + std::to_string(k));
    auto t = noise::uniform_flip_matrix(s.classes, s.noise.discrete_rates[k]);
    auto res = noise::corrupt_discrete(sp.clean_class, t, rng);
    sp.noisy_class.push_back(std::move(res.labels));
    sp.flip_mask.push_back(std::move(res.flipped));
  }
  for (std::size_t k = 0; k < s.noise.continuous_rates.size(); ++k) {
    Rng rng = derive_rng(s.seed, "noise.continuous." + std::to_string(k));
    auto res = noise::corrupt_continuous(sp.clean_cont, s.continuous_dim,
                                         s.noise.continuous_rates[k], rng);
    sp.noisy_cont.push_back(std::move(res.values));
    sp.outlier_mask.push_back(std::move(res.replaced));
  }
}

Dataset build(const DatasetSpec& spec) {
  Dataset ds;
  ds.spec = spec.resolved();
  Rng train_rng = derive_rng(ds.spec.seed, "data.train");
  Rng test_rng = derive_rng(ds.spec.seed, "data.test");
  ds.train = clean_split(ds.spec, ds.spec.n_train, train_rng);
  ds.test = clean_split(ds.spec, ds.spec.n_test, test_rng);
  apply_noise(ds.spec, ds.train);
  return ds;
}

}  // namespace

Dataset gen_blobs(const DatasetSpec& spec) {
  if (spec.generator != Generator::blobs) throw std::invalid_argument("gen_blobs: spec is not blobs");
  return build(spec);
}

Dataset gen_patterns(const DatasetSpec& spec) {
  if (spec.generator != Generator::patterns)
    throw std::invalid_argument("gen_patterns: spec is not patterns");
  return build(spec);
}

Dataset generate(const DatasetSpec& spec) {
  return spec.generator == Generator::blobs ? gen_blobs(spec) : gen_patterns(spec);
}

namespace {

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + io::format_double(v[i]);
  return s;
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

io::Header spec_header(const DatasetSpec& s) {
  io::Header h;
  h["generator"] = to_string(s.generator);
  h["n_train"] = std::to_string(s.n_train);
  h["n_test"] = std::to_string(s.n_test);
  h["classes"] = std::to_string(s.classes);
  h["input_dim"] = std::to_string(s.input_dim);
  h["side"] = std::to_string(s.side);
  h["continuous_dim"] = std::to_string(s.continuous_dim);
  h["class_anchors"] = join_doubles(s.class_anchors);
  h["anchor_jitter"] = io::format_double(s.anchor_jitter);
  h["blob_spread"] = io::format_double(s.blob_spread);
  h["center_distance"] = io::format_double(s.center_distance);
  h["pattern_noise"] = io::format_double(s.pattern_noise);
  h["seed"] = std::to_string(s.seed);
  h["noise.discrete_rates"] = join_doubles(s.noise.discrete_rates);
  h["noise.continuous_rates"] = join_doubles(s.noise.continuous_rates);
  return h;
}

DatasetSpec spec_from_header(const io::Header& h) {
  DatasetSpec s;
  s.generator = generator_from_string(io::header_get(h, "generator"));
  s.n_train = std::stoul(io::header_get(h, "n_train"));
  s.n_test = std::stoul(io::header_get(h, "n_test"));
  s.classes = std::stoul(io::header_get(h, "classes"));
  s.input_dim = std::stoul(io::header_get(h, "input_dim"));
  s.side = std::stoul(io::header_get(h, "side"));
  s.continuous_dim = std::stoul(io::header_get(h, "continuous_dim"));
  s.class_anchors = split_doubles(io::header_get(h, "class_anchors"));
  s.anchor_jitter = std::stod(io::header_get(h, "anchor_jitter"));
  s.blob_spread = std::stod(io::header_get(h, "blob_spread"));
  s.center_distance = std::stod(io::header_get(h, "center_distance"));
  s.pattern_noise = std::stod(io::header_get(h, "pattern_noise"));
  s.seed = std::stoull(io::header_get(h, "seed"));
  s.noise.discrete_rates = split_doubles(io::header_get(h, "noise.discrete_rates"));
  s.noise.continuous_rates = split_doubles(io::header_get(h, "noise.continuous_rates"));
  return s;
}

void write_split(io::Writer& w, const Split& s) {
  w.u64(s.n);
  w.u64(s.dim);
  w.u64(s.cont_dim);
  w.f64s(s.x);
  w.i32s(s.clean_class);
  w.f64s(s.clean_cont);
  w.u64(s.noisy_class.size());
  for (std::size_t k = 0; k < s.noisy_class.size(); ++k) {
    w.i32s(s.noisy_class[k]);
    w.u8s(s.flip_mask[k]);
  }
  w.u64(s.noisy_cont.size());
  for (std::size_t k = 0; k < s.noisy_cont.size(); ++k) {
    w.f64s(s.noisy_cont[k]);
    w.u8s(s.outlier_mask[k]);
  }
}

Split read_split(io::Reader& r) {
  Split s;
  s.n = r.u64();
  s.dim = r.u64();
  s.cont_dim = r.u64();
  s.x = r.f64s();
  s.clean_class = r.i32s();
  s.clean_cont = r.f64s();
  if (s.x.size() != s.n * s.dim || s.clean_class.size() != s.n ||
      s.clean_cont.size() != s.n * s.cont_dim)
    throw io::FormatError("dataset: split arrays inconsistent with header sizes");
  const std::uint64_t nd = r.u64();
  for (std::uint64_t k = 0; k < nd; ++k) {
    s.noisy_class.push_back(r.i32s());
    s.flip_mask.push_back(r.u8s());
    if (s.noisy_class.back().size() != s.n || s.flip_mask.back().size() != s.n)
      throw io::FormatError("dataset: noisy label set has wrong length");
  }
  const std::uint64_t nc = r.u64();
  for (std::uint64_t k = 0; k < nc; ++k) {
    s.noisy_cont.push_back(r.f64s());
    s.outlier_mask.push_back(r.u8s());
    if (s.noisy_cont.back().size() != s.n * s.cont_dim || s.outlier_mask.back().size() != s.n)
      throw io::FormatError("dataset: noisy continuous set has wrong length");
  }
  return s;
}

}  // namespace

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write dataset " + path.string());
  io::write_header(os, kDatasetMagic, kDatasetVersion, spec_header(ds.spec));
  io::Writer w(os);
  write_split(w, ds.train);
  write_split(w, ds.test);
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open dataset " + path.string());
  Dataset ds;
  ds.spec = spec_from_header(io::read_header(is, kDatasetMagic, kDatasetVersion));
  io::Reader r(is);
  ds.train = read_split(r);
  ds.test = read_split(r);
  r.expect_eof();
  return ds;
}

RealizedNoise realized_noise(const Dataset& ds) {
  RealizedNoise out;
  out.discrete_nominal = ds.spec.noise.discrete_rates;
  out.continuous_nominal = ds.spec.noise.continuous_rates;
  auto rate = [](const std::vector<std::uint8_t>& m) {
    return m.empty() ? 0.0
                     : static_cast<double>(std::count(m.begin(), m.end(), std::uint8_t{1})) /
                           static_cast<double>(m.size());
  };
  for (const auto& m : ds.train.flip_mask) out.discrete_realized.push_back(rate(m));
  for (const auto& m : ds.train.outlier_mask) out.continuous_realized.push_back(rate(m));
  return out;
}

}  // namespace nmt::data
