#pragma once

// Siamese embedding head, contrastive loss and its SGD trainer.
//
// The base head maps a descriptor through one tanh layer to a 2-d feature.
// The enhanced head keeps that trunk, projects the pair geometry
// (IoU, area ratio) affinely to the trunk width, concatenates both and maps
// the result to a 4-d feature. A pair is always embedded asymmetrically:
// the anchor side (earlier observation) carries the self-pair geometry
// (1, 1), the probe side carries the pair's actual geometry. Geometric
// disagreement therefore shows up as embedding distance.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "simtrack/descriptor.hpp"
#include "simtrack/error.hpp"
#include "simtrack/geometry.hpp"
#include "simtrack/rng.hpp"

namespace simtrack {

enum class HeadKind { Base, Enhanced };

inline std::string_view to_string(HeadKind kind) {
  return kind == HeadKind::Base ? "base" : "enhanced";
}

inline constexpr std::size_t kBaseOutputDim = 2;
inline constexpr std::size_t kEnhancedOutputDim = 4;
inline constexpr std::size_t kDefaultHiddenDim = 16;
inline constexpr double kBaseMargin = 3.0;
inline constexpr double kEnhancedMargin = 0.5;

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

/// L2 distance between two embeddings of the same head.
inline double euclidean_distance(const EmbeddingVector& f, const EmbeddingVector& g) {
  if (f.size() != g.size()) {
    throw ConfigError("embedding dimension mismatch (" + std::to_string(f.size()) +
                      " vs " + std::to_string(g.size()) + "): incompatible heads");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = f.values[i] - g.values[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

struct DistanceLabel {
  double distance = 0.0;
  int label = 0;  // 1 = matching pair
};

/// (1 / 2N) * sum( y * E^2 + (1 - y) * max(m - E, 0)^2 ).
inline double contrastive_loss(std::span<const DistanceLabel> batch, double margin) {
  if (batch.empty()) throw ValidationError("contrastive loss of an empty batch");
  if (!(margin > 0.0)) throw ValidationError("margin must be positive");
  double sum = 0.0;
  for (const auto& [e, y] : batch) {
    if (e < 0.0 || !std::isfinite(e)) throw ValidationError("distances must be finite and >= 0");
    if (y == 1) {
      sum += e * e;
    } else {
      const double gap = std::max(margin - e, 0.0);
      sum += gap * gap;
    }
  }
  return sum / (2.0 * static_cast<double>(batch.size()));
}

/// A labelled training pair. `geometry` holds (IoU, area ratio) between the
/// two boxes and is consumed only by the enhanced head.
struct PairSample {
  Descriptor a;
  Descriptor b;
  GeometryFeatures geometry;
  int label = 0;
};

class EmbeddingModel {
 public:
  using Matrix = Eigen::MatrixXd;
  using Vector = Eigen::VectorXd;

  /// Base head with uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights.
  static EmbeddingModel base(std::uint64_t seed, double margin = kBaseMargin,
                             std::size_t descriptor_dim = kDescriptorDim,
                             std::size_t hidden_dim = kDefaultHiddenDim) {
    EmbeddingModel m(HeadKind::Base, margin, seed, descriptor_dim, hidden_dim);
    Rng rng = make_rng(seed, "embedding-init");
    m.init_uniform(rng);
    return m;
  }

  /// Enhanced head with freshly initialized weights everywhere.
  static EmbeddingModel enhanced(std::uint64_t seed, double margin = kEnhancedMargin,
                                 std::size_t descriptor_dim = kDescriptorDim,
                                 std::size_t hidden_dim = kDefaultHiddenDim) {
    EmbeddingModel m(HeadKind::Enhanced, margin, seed, descriptor_dim, hidden_dim);
    Rng rng = make_rng(seed, "embedding-init");
    m.init_uniform(rng);
    return m;
  }

  /// Enhanced head transferred from a trained base head: the trunk is
  /// copied, the new output layer starts from the base output layer where the
  /// shapes overlap (first two rows, trunk columns) and is seeded elsewhere.
  static EmbeddingModel enhanced_from(const EmbeddingModel& base, std::uint64_t seed,
                                      double margin = kEnhancedMargin) {
    if (base.head_ != HeadKind::Base) throw ConfigError("enhanced_from expects a base head");
    EmbeddingModel m = enhanced(seed, margin, base.descriptor_dim(), base.hidden_dim());
    m.trunk_w_ = base.trunk_w_;
    m.trunk_b_ = base.trunk_b_;
    m.out_w_.block(0, 0, kBaseOutputDim, base.hidden_dim()) = base.out_w_;
    m.out_b_.head(kBaseOutputDim) = base.out_b_;
    return m;
  }

  static EmbeddingModel zeros(HeadKind head, double margin = kBaseMargin,
                              std::size_t descriptor_dim = kDescriptorDim,
                              std::size_t hidden_dim = kDefaultHiddenDim) {
    return EmbeddingModel(head, margin, 0, descriptor_dim, hidden_dim);
  }

  HeadKind head() const { return head_; }
  double margin() const { return margin_; }
  std::uint64_t seed() const { return seed_; }
  bool base_frozen() const { return base_frozen_; }
  std::size_t descriptor_dim() const { return static_cast<std::size_t>(trunk_w_.cols()); }
  std::size_t hidden_dim() const { return static_cast<std::size_t>(trunk_w_.rows()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(out_w_.rows()); }

  void set_margin(double margin) {
    if (!(margin > 0.0)) throw ValidationError("margin must be positive");
    margin_ = margin;
  }

  /// Trunk (descriptor layer) parameters stop receiving updates.
  void freeze_base() {
    require_enhanced("freeze_base");
    base_frozen_ = true;
  }
  void unfreeze_base() {
    require_enhanced("unfreeze_base");
    base_frozen_ = false;
  }

  /// Visits every parameter block in declared (serialization) order:
  /// trunk_w, trunk_b, [geo_w, geo_b,] out_w, out_b. `is_base` marks the
  /// trunk blocks.
  template <typename Self, typename Fn>
  static void visit(Self& self, Fn&& fn) {
    fn("trunk_w", self.trunk_w_, true);
    fn("trunk_b", self.trunk_b_, true);
    if (self.head_ == HeadKind::Enhanced) {
      fn("geo_w", self.geo_w_, false);
      fn("geo_b", self.geo_b_, false);
    }
    fn("out_w", self.out_w_, false);
    fn("out_b", self.out_b_, false);
  }
  template <typename Fn>
  void for_each_block(Fn&& fn) { visit(*this, fn); }
  template <typename Fn>
  void for_each_block(Fn&& fn) const { visit(*this, fn); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for_each_block([&](std::string_view, const auto& block, bool) { n += block.size(); });
    return n;
  }

  /// All parameters flattened in declared order (column-major per block).
  std::vector<double> parameters() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for_each_block([&](std::string_view, const auto& block, bool) {
      for (Eigen::Index i = 0; i < block.size(); ++i) out.push_back(block.data()[i]);
    });
    return out;
  }

  void set_parameters(std::span<const double> values) {
    if (values.size() != parameter_count()) throw ValidationError("parameter count mismatch");
    std::size_t k = 0;
    for_each_block([&](std::string_view, auto& block, bool) {
      for (Eigen::Index i = 0; i < block.size(); ++i) block.data()[i] = values[k++];
    });
  }

  /// Hidden trunk activation and the final feature.
  struct Forward {
    Vector input;
    Vector hidden;
    Vector geo_input;
    Vector geo;
    Vector output;
  };

  Forward forward(const Descriptor& d, std::optional<GeometryFeatures> geo) const {
    if (d.size() != descriptor_dim()) {
      throw ConfigError("descriptor has dimension " + std::to_string(d.size()) +
                        ", model expects " + std::to_string(descriptor_dim()));
    }
    if (head_ == HeadKind::Enhanced && !geo) {
      throw ConfigError("enhanced head requires pair geometry");
    }
    if (head_ == HeadKind::Base && geo) {
      throw ConfigError("base head does not accept pair geometry");
    }
    Forward f;
    f.input = Eigen::Map<const Vector>(d.values.data(), static_cast<Eigen::Index>(d.size()));
    f.hidden = (trunk_w_ * f.input + trunk_b_).array().tanh().matrix();
    if (head_ == HeadKind::Base) {
      f.output = out_w_ * f.hidden + out_b_;
    } else {
      f.geo_input = Vector(2);
      f.geo_input << geo->iou, geo->area_ratio;
      f.geo = geo_w_ * f.geo_input + geo_b_;
      Vector joined(f.hidden.size() + f.geo.size());
      joined << f.hidden, f.geo;
      f.output = out_w_ * joined + out_b_;
    }
    return f;
  }

  /// Trunk activation of a descriptor; combine with `embed_hidden` to reuse
  /// one trunk pass across many pair geometries.
  Vector hidden_features(const Descriptor& d) const {
    if (d.size() != descriptor_dim()) {
      throw ConfigError("descriptor has dimension " + std::to_string(d.size()) +
                        ", model expects " + std::to_string(descriptor_dim()));
    }
    const Eigen::Map<const Vector> x(d.values.data(), static_cast<Eigen::Index>(d.size()));
    return (trunk_w_ * x + trunk_b_).array().tanh().matrix();
  }

  EmbeddingVector embed_hidden(const Vector& hidden, std::optional<GeometryFeatures> geo) const {
    if (head_ == HeadKind::Enhanced && !geo) throw ConfigError("enhanced head requires pair geometry");
    if (head_ == HeadKind::Base && geo) throw ConfigError("base head does not accept pair geometry");
    Vector out;
    if (head_ == HeadKind::Base) {
      out = out_w_ * hidden + out_b_;
    } else {
      const Eigen::Index h = hidden.size();
      Vector g_in(2);
      g_in << geo->iou, geo->area_ratio;
      out = out_w_.leftCols(h) * hidden + out_w_.rightCols(h) * (geo_w_ * g_in + geo_b_) + out_b_;
    }
    return EmbeddingVector{std::vector<double>(out.data(), out.data() + out.size())};
  }

  EmbeddingVector embed(const Descriptor& d, std::optional<GeometryFeatures> geo) const {
    const Forward f = forward(d, geo);
    return EmbeddingVector{std::vector<double>(f.output.data(), f.output.data() + f.output.size())};
  }

  /// Embeds the anchor side of a pair (self geometry for the enhanced head).
  EmbeddingVector embed_anchor(const Descriptor& d) const {
    return embed(d, head_ == HeadKind::Enhanced ? std::optional(kSelfGeometry) : std::nullopt);
  }

  /// Embeds the probe side of a pair, carrying the pair's geometry.
  EmbeddingVector embed_probe(const Descriptor& d, const GeometryFeatures& g) const {
    return embed(d, head_ == HeadKind::Enhanced ? std::optional(g) : std::nullopt);
  }

  double pair_distance(const PairSample& s) const {
    return euclidean_distance(embed_anchor(s.a), embed_probe(s.b, s.geometry));
  }

  /// Gradient buffers with the same shapes as the parameters.
  struct Gradient {
    Matrix trunk_w;
    Vector trunk_b;
    Matrix geo_w;
    Vector geo_b;
    Matrix out_w;
    Vector out_b;

    std::vector<double> flatten(HeadKind head) const {
      std::vector<double> out;
      auto push = [&](const auto& block) {
        for (Eigen::Index i = 0; i < block.size(); ++i) out.push_back(block.data()[i]);
      };
      push(trunk_w);
      push(trunk_b);
      if (head == HeadKind::Enhanced) {
        push(geo_w);
        push(geo_b);
      }
      push(out_w);
      push(out_b);
      return out;
    }
  };

  Gradient zero_gradient() const {
    Gradient g;
    g.trunk_w = Matrix::Zero(trunk_w_.rows(), trunk_w_.cols());
    g.trunk_b = Vector::Zero(trunk_b_.size());
    g.geo_w = Matrix::Zero(geo_w_.rows(), geo_w_.cols());
    g.geo_b = Vector::Zero(geo_b_.size());
    g.out_w = Matrix::Zero(out_w_.rows(), out_w_.cols());
    g.out_b = Vector::Zero(out_b_.size());
    return g;
  }

  /// Accumulates d(loss)/d(params) given d(loss)/d(output) of one forward pass.
  void backward(const Forward& f, const Vector& d_output, Gradient& g) const {
    g.out_b += d_output;
    Vector d_hidden;
    if (head_ == HeadKind::Base) {
      g.out_w.noalias() += d_output * f.hidden.transpose();
      d_hidden = out_w_.transpose() * d_output;
    } else {
      const Eigen::Index h = f.hidden.size();
      g.out_w.leftCols(h).noalias() += d_output * f.hidden.transpose();
      g.out_w.rightCols(f.geo.size()).noalias() += d_output * f.geo.transpose();
      const Vector d_joined = out_w_.transpose() * d_output;
      d_hidden = d_joined.head(h);
      const Vector d_geo = d_joined.tail(f.geo.size());
      g.geo_b += d_geo;
      g.geo_w.noalias() += d_geo * f.geo_input.transpose();
    }
    const Vector d_pre = d_hidden.array() * (1.0 - f.hidden.array().square());
    g.trunk_b += d_pre;
    g.trunk_w.noalias() += d_pre * f.input.transpose();
  }

  /// Plain SGD step. Trunk blocks are skipped while `freeze_trunk` holds.
  void apply_gradient(const Gradient& g, double lr, bool freeze_trunk) {
    if (!freeze_trunk) {
      trunk_w_ -= lr * g.trunk_w;
      trunk_b_ -= lr * g.trunk_b;
    }
    if (head_ == HeadKind::Enhanced) {
      geo_w_ -= lr * g.geo_w;
      geo_b_ -= lr * g.geo_b;
    }
    out_w_ -= lr * g.out_w;
    out_b_ -= lr * g.out_b;
  }

  friend bool operator==(const EmbeddingModel& a, const EmbeddingModel& b) {
    return a.head_ == b.head_ && a.margin_ == b.margin_ && a.seed_ == b.seed_ &&
           a.base_frozen_ == b.base_frozen_ && a.trunk_w_ == b.trunk_w_ &&
           a.trunk_b_ == b.trunk_b_ && a.geo_w_ == b.geo_w_ && a.geo_b_ == b.geo_b_ &&
           a.out_w_ == b.out_w_ && a.out_b_ == b.out_b_;
  }

  void save(std::ostream& out) const;
  static EmbeddingModel load(std::istream& in);

 private:
  EmbeddingModel(HeadKind head, double margin, std::uint64_t seed, std::size_t descriptor_dim,
                 std::size_t hidden_dim)
      : head_(head), margin_(margin), seed_(seed) {
    if (!(margin > 0.0)) throw ValidationError("margin must be positive");
    if (descriptor_dim == 0 || hidden_dim == 0) throw ValidationError("layer widths must be positive");
    const auto k = static_cast<Eigen::Index>(descriptor_dim);
    const auto h = static_cast<Eigen::Index>(hidden_dim);
    trunk_w_ = Matrix::Zero(h, k);
    trunk_b_ = Vector::Zero(h);
    if (head == HeadKind::Base) {
      out_w_ = Matrix::Zero(kBaseOutputDim, h);
      out_b_ = Vector::Zero(kBaseOutputDim);
    } else {
      geo_w_ = Matrix::Zero(h, 2);
      geo_b_ = Vector::Zero(h);
      out_w_ = Matrix::Zero(kEnhancedOutputDim, 2 * h);
      out_b_ = Vector::Zero(kEnhancedOutputDim);
    }
  }

  void require_enhanced(const char* op) const {
    if (head_ != HeadKind::Enhanced) {
      throw ConfigError(std::string(op) + " requires an enhanced head");
    }
  }

  void init_uniform(Rng& rng) {
    auto fill = [&](auto& block, double fan_in) {
      const double bound = 1.0 / std::sqrt(fan_in);
      for (Eigen::Index i = 0; i < block.size(); ++i) block.data()[i] = uniform(rng, -bound, bound);
    };
    fill(trunk_w_, static_cast<double>(trunk_w_.cols()));
    fill(trunk_b_, static_cast<double>(trunk_w_.cols()));
    if (head_ == HeadKind::Enhanced) {
      fill(geo_w_, 2.0);
      fill(geo_b_, 2.0);
    }
    fill(out_w_, static_cast<double>(out_w_.cols()));
    fill(out_b_, static_cast<double>(out_w_.cols()));
  }

  HeadKind head_;
  double margin_;
  std::uint64_t seed_;
  bool base_frozen_ = false;
  Matrix trunk_w_;
  Vector trunk_b_;
  Matrix geo_w_;
  Vector geo_b_;
  Matrix out_w_;
  Vector out_b_;
};

inline EmbeddingVector embed(const EmbeddingModel& model, const Descriptor& d,
                             std::optional<GeometryFeatures> geo = std::nullopt) {
  return model.embed(d, geo);
}

inline EmbeddingModel freeze_base(EmbeddingModel model) {
  model.freeze_base();
  return model;
}

inline EmbeddingModel unfreeze_base(EmbeddingModel model) {
  model.unfreeze_base();
  return model;
}

struct LossAndGradient {
  double loss = 0.0;
  EmbeddingModel::Gradient gradient;
};

/// Contrastive loss of a batch and its exact gradient through both Siamese
/// branches (shared weights, so both branches accumulate into one buffer).
inline LossAndGradient contrastive_loss_and_gradient(const EmbeddingModel& model,
                                                     std::span<const PairSample> batch,
                                                     double margin) {
  if (batch.empty()) throw ValidationError("contrastive loss of an empty batch");
  LossAndGradient out{0.0, model.zero_gradient()};
  const bool enhanced = model.head() == HeadKind::Enhanced;
  const double n = static_cast<double>(batch.size());
  for (const PairSample& s : batch) {
    const auto fa = model.forward(s.a, enhanced ? std::optional(kSelfGeometry) : std::nullopt);
    const auto fb = model.forward(s.b, enhanced ? std::optional(s.geometry) : std::nullopt);
    const EmbeddingModel::Vector diff = fa.output - fb.output;
    const double e = diff.norm();
    double coef = 0.0;
    if (s.label == 1) {
      out.loss += e * e;
      coef = 1.0 / n;
    } else {
      const double gap = std::max(margin - e, 0.0);
      out.loss += gap * gap;
      // The hinge is not differentiable at E = 0; use the zero subgradient.
      if (gap > 0.0 && e > 0.0) coef = -gap / (e * n);
    }
    if (coef != 0.0) {
      const EmbeddingModel::Vector d_out = coef * diff;
      model.backward(fa, d_out, out.gradient);
      model.backward(fb, -d_out, out.gradient);
    }
  }
  out.loss /= 2.0 * n;
  return out;
}

inline double dataset_loss(const EmbeddingModel& model, std::span<const PairSample> samples,
                           double margin) {
  std::vector<DistanceLabel> dl;
  dl.reserve(samples.size());
  for (const auto& s : samples) dl.push_back({model.pair_distance(s), s.label});
  return contrastive_loss(dl, margin);
}

struct TrainConfig {
  int epochs = 50;
  int batch_size = 128;
  double learning_rate = 0.01;
  std::optional<double> margin;  // overrides the model margin when set
  std::uint64_t seed = kDefaultSeed;
  int freeze_epochs = 0;  // leading epochs with the trunk locked (enhanced only)
  std::vector<int> lr_decay_epochs;
  double lr_decay_factor = 0.1;
};

struct TrainResult {
  EmbeddingModel model;
  std::vector<double> loss_history;  // full-set loss after each epoch
  std::vector<std::string> warnings;
};

/// Mini-batch SGD on the contrastive loss. Samples are reshuffled every epoch
/// from the "trainer" sub-stream of `config.seed`.
inline TrainResult train(EmbeddingModel model, std::span<const PairSample> samples,
                         const TrainConfig& config) {
  if (config.epochs < 0) throw ValidationError("epochs must be >= 0");
  if (config.batch_size <= 0) throw ValidationError("batch_size must be positive");
  if (!(config.learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
  if (config.freeze_epochs > 0 && model.head() != HeadKind::Enhanced) {
    throw ConfigError("a freeze schedule requires an enhanced head");
  }
  if (config.margin) model.set_margin(*config.margin);

  TrainResult result{model, {}, {}};
  if (config.epochs == 0) return result;
  if (samples.empty()) throw ValidationError("no training samples");

  const bool has_pos = std::any_of(samples.begin(), samples.end(), [](auto& s) { return s.label == 1; });
  const bool has_neg = std::any_of(samples.begin(), samples.end(), [](auto& s) { return s.label != 1; });
  if (!has_pos || !has_neg) {
    result.warnings.push_back(
        "training set contains a single label; embeddings will collapse or diverge");
  }

  Rng rng = make_rng(config.seed, "trainer");
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<PairSample> batch;
  double lr = config.learning_rate;
  const double margin = model.margin();

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (std::find(config.lr_decay_epochs.begin(), config.lr_decay_epochs.end(), epoch) !=
        config.lr_decay_epochs.end()) {
      lr *= config.lr_decay_factor;
    }
    const bool frozen = model.base_frozen() || epoch < config.freeze_epochs;
    // Fisher-Yates with our own draws keeps the order toolchain independent.
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(order[i - 1], order[j]);
    }
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(samples[order[i]]);
      const auto lg = contrastive_loss_and_gradient(model, batch, margin);
      model.apply_gradient(lg.gradient, lr, frozen);
    }
    result.loss_history.push_back(dataset_loss(model, samples, margin));
  }
  result.model = std::move(model);
  return result;
}

// ---------------------------------------------------------------------------
// Model files.
//
//   ESNN-MODEL v1
//   head <base|enhanced>
//   descriptor_dim <K>
//   hidden_dim <H>
//   output_dim <2|4>
//   margin <m>
//   seed <u64>
//   frozen <0|1>
//   <block-name> <rows> <cols>
//   <rows*cols values, column-major, one per line, %.17g>
//   ...
//
// Blocks appear in declared order: trunk_w trunk_b [geo_w geo_b] out_w out_b.
// ---------------------------------------------------------------------------

inline constexpr std::string_view kModelMagic = "ESNN-MODEL v1";

inline void EmbeddingModel::save(std::ostream& out) const {
  out << kModelMagic << '\n'
      << "head " << to_string(head_) << '\n'
      << "descriptor_dim " << descriptor_dim() << '\n'
      << "hidden_dim " << hidden_dim() << '\n'
      << "output_dim " << output_dim() << '\n'
      << std::setprecision(17) << "margin " << margin_ << '\n'
      << "seed " << seed_ << '\n'
      << "frozen " << (base_frozen_ ? 1 : 0) << '\n';
  for_each_block([&](std::string_view name, const auto& block, bool) {
    out << name << ' ' << block.rows() << ' ' << block.cols() << '\n';
    for (Eigen::Index i = 0; i < block.size(); ++i) out << block.data()[i] << '\n';
  });
  if (!out) throw IoError("failed writing model");
}

inline EmbeddingModel EmbeddingModel::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kModelMagic) {
    throw ValidationError("not a model file: missing '" + std::string(kModelMagic) + "' header");
  }
  auto expect = [&](std::string_view key) {
    std::string k;
    if (!(in >> k) || k != key) {
      throw ValidationError("model file: expected '" + std::string(key) + "'");
    }
  };
  std::string head_name;
  std::size_t k = 0, h = 0, o = 0;
  double margin = 0.0;
  std::uint64_t seed = 0;
  int frozen = 0;
  expect("head");
  in >> head_name;
  expect("descriptor_dim");
  in >> k;
  expect("hidden_dim");
  in >> h;
  expect("output_dim");
  in >> o;
  expect("margin");
  in >> margin;
  expect("seed");
  in >> seed;
  expect("frozen");
  in >> frozen;
  if (!in) throw ValidationError("model file: truncated header");
  HeadKind head;
  if (head_name == "base") {
    head = HeadKind::Base;
  } else if (head_name == "enhanced") {
    head = HeadKind::Enhanced;
  } else {
    throw ValidationError("model file: unknown head '" + head_name + "'");
  }
  EmbeddingModel m(head, margin, seed, k, h);
  if (o != m.output_dim()) throw ValidationError("model file: output_dim does not match head");
  m.base_frozen_ = frozen != 0;
  m.for_each_block([&](std::string_view name, auto& block, bool) {
    std::string got;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> got >> rows >> cols) || got != name || rows != block.rows() ||
        cols != block.cols()) {
      throw ValidationError("model file: bad block header for '" + std::string(name) + "'");
    }
    for (Eigen::Index i = 0; i < block.size(); ++i) {
      if (!(in >> block.data()[i])) {
        throw ValidationError("model file: truncated block '" + std::string(name) + "'");
      }
    }
  });
  return m;
}

inline void save_model(const EmbeddingModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  model.save(out);
}

inline EmbeddingModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return EmbeddingModel::load(in);
}

}  // namespace simtrack
