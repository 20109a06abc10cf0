#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "sopool/commands.hpp"
#include "sopool/kernelmap.hpp"
#include "sopool/linalg.hpp"

namespace sopool {

namespace {

constexpr std::size_t kFeatureDim = 4;
constexpr std::size_t kMapSide = 6;
constexpr std::size_t kBlob = 2;
// Top-left corners of the class blobs, spread over the 6×6 map.
constexpr std::size_t kCorners[][2] = {{0, 0}, {4, 0}, {0, 4}, {4, 4}, {2, 2},
                                       {2, 0}, {0, 2}, {4, 2}, {2, 4}};

struct Sample {
  Matrix x;  // kFeatureDim × N raw features
  std::size_t label = 0;
};

// Every sample holds the same blob pattern over the same background
// distribution; only where the blob sits depends on the class.
std::vector<Sample> make_dataset(const DemoOptions& opts, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> background(0.0, 0.3);
  std::normal_distribution<double> jitter(0.0, 0.05);
  const double blob[kFeatureDim] = {1.0, 0.8, 0.1, 0.1};
  std::vector<Sample> data;
  for (std::size_t c = 0; c < opts.classes; ++c) {
    for (std::size_t s = 0; s < opts.samples_per_class; ++s) {
      Sample smp{Matrix(kFeatureDim, kMapSide * kMapSide), c};
      for (double& v : smp.x.flat()) v = background(rng);
      for (std::size_t dy = 0; dy < kBlob; ++dy) {
        for (std::size_t dx = 0; dx < kBlob; ++dx) {
          const std::size_t col = (kCorners[c][1] + dy) * kMapSide + kCorners[c][0] + dx;
          for (std::size_t i = 0; i < kFeatureDim; ++i) smp.x(i, col) = blob[i] + jitter(rng);
        }
      }
      data.push_back(std::move(smp));
    }
  }
  return data;
}

struct Params {
  Matrix proj;                  // kFeatureDim × kFeatureDim
  std::vector<Matrix> weights;  // one dim×dim matrix per class
  std::vector<double> bias;
};

// RMSprop state mirrors Params entry for entry.
struct RmsProp {
  double lr = 0.0;
  double decay = 0.99;
  double eps = 1e-8;
  std::vector<double> cache;

  void step(std::vector<double*>& theta, const std::vector<double>& grad) {
    if (cache.empty()) cache.assign(theta.size(), 0.0);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      cache[i] = decay * cache[i] + (1.0 - decay) * grad[i] * grad[i];
      *theta[i] -= lr * grad[i] / (std::sqrt(cache[i]) + eps);
    }
  }
};

std::vector<double*> flatten(Params& p) {
  std::vector<double*> out;
  for (double& v : p.proj.flat()) out.push_back(&v);
  for (auto& w : p.weights) {
    for (double& v : w.flat()) out.push_back(&v);
  }
  for (double& b : p.bias) out.push_back(&b);
  return out;
}

struct Forward {
  Matrix projected;
  AugmentedBatch aug;
  CoocMatrix m;
  SymMatrix psi;
  std::vector<double> prob;
  double loss = 0.0;
};

class Model {
 public:
  Model(const RunConfig& cfg, const Matrix& codes) : cfg_(cfg), codes_(codes) {}

  Forward forward(const Params& p, const Sample& s) const {
    Forward f;
    f.projected = matmul(p.proj, s.x);
    const FeatureBatch centered = rectify_center(FeatureBatch{f.projected, std::nullopt}, cfg_.pn.beta);
    f.aug = augment(centered, codes_);
    f.m = cooc_matrix(f.aug);
    f.psi = cfg_.spectral ? spectral_fwd(f.m, plan()) : pn_fwd(f.m, cfg_.pn);
    std::vector<double> logits(p.weights.size());
    for (std::size_t k = 0; k < logits.size(); ++k) logits[k] = inner(p.weights[k], f.psi) + p.bias[k];
    const double top = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double& l : logits) z += std::exp(l - top);
    f.prob.resize(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) f.prob[k] = std::exp(logits[k] - top) / z;
    f.loss = -(logits[s.label] - top - std::log(z));
    return f;
  }

  // Adds this sample's gradient, scaled by `scale`, into grad (flattened in
  // the same order as flatten()).
  void backward(const Params& p, const Sample& s, const Forward& f, double scale,
                std::vector<double>& grad) const {
    const std::size_t dim = f.psi.dim();
    Matrix upstream(dim, dim);
    std::size_t offset = p.proj.flat().size();
    for (std::size_t k = 0; k < p.weights.size(); ++k) {
      const double delta = (f.prob[k] - (k == s.label ? 1.0 : 0.0)) * scale;
      const auto psi = f.psi.matrix().flat();
      for (std::size_t i = 0; i < psi.size(); ++i) grad[offset + i] += delta * psi[i];
      offset += psi.size();
      upstream += p.weights[k] * delta;
    }
    for (std::size_t k = 0; k < p.bias.size(); ++k) {
      grad[offset + k] += (f.prob[k] - (k == s.label ? 1.0 : 0.0)) * scale;
    }
    const SymMatrix up = sym(upstream);
    const Matrix dphi =
        cfg_.spectral ? spectral_pool(f.m, f.aug, up, plan()).dphi : pn_bwd(f.m, f.aug, up, cfg_.pn).dphi;
    Matrix masked = dphi;
    for (std::size_t i = 0; i < masked.rows(); ++i) {
      for (std::size_t n = 0; n < masked.cols(); ++n) {
        if (!(f.projected(i, n) > 0.0)) masked(i, n) = 0.0;
      }
    }
    const Matrix dproj = matmul(masked, transpose(s.x));
    const auto flat = dproj.flat();
    for (std::size_t i = 0; i < flat.size(); ++i) grad[i] += flat[i];
  }

 private:
  SpectralPlan plan() const { return SpectralPlan{cfg_.pn.kind, SpectralPath::Eigen, cfg_.pn}; }

  const RunConfig& cfg_;
  const Matrix& codes_;
};

}  // namespace

DemoResult cmd_demo_train(const RunConfig& cfg, const DemoOptions& opts, std::ostream& out) {
  cfg.validate();
  require(opts.classes >= 2, ErrorKind::Config, "demo-train needs at least 2 classes");
  require(opts.classes <= std::size(kCorners), ErrorKind::Config,
          "demo-train supports at most 9 classes");
  require(opts.samples_per_class >= 1 && opts.batch_size >= 1, ErrorKind::Config,
          "demo-train needs samples and a positive batch size");
  require(opts.learning_rate >= 0.0, ErrorKind::Config, "learning rate must be nonnegative");
  const auto t0 = std::chrono::steady_clock::now();

  std::mt19937_64 rng(cfg.seed);
  const std::vector<Sample> data = make_dataset(opts, rng);
  const std::size_t n = kMapSide * kMapSide;
  const Matrix codes = cfg.alpha == 0.0 ? Matrix(2 * cfg.z, n)
                                        : spatial_codes(n, kMapSide, kMapSide, cfg.alpha,
                                                        make_grid(cfg.z, cfg.sigma));
  const std::size_t dim = kFeatureDim + 2 * cfg.z;

  Params params;
  std::normal_distribution<double> init(0.0, 0.01);
  params.proj = Matrix::identity(kFeatureDim);
  for (double& v : params.proj.flat()) v += init(rng);
  for (std::size_t k = 0; k < opts.classes; ++k) {
    Matrix w(dim, dim);
    for (double& v : w.flat()) v = init(rng);
    params.weights.push_back(std::move(w));
  }
  params.bias.assign(opts.classes, 0.0);

  const Model model(cfg, codes);
  auto mean_loss = [&](std::size_t* correct) {
    double total = 0.0;
    for (const Sample& s : data) {
      const Forward f = model.forward(params, s);
      total += f.loss;
      if (correct) {
        const auto best = std::max_element(f.prob.begin(), f.prob.end()) - f.prob.begin();
        *correct += static_cast<std::size_t>(best) == s.label ? 1 : 0;
      }
    }
    return total / static_cast<double>(data.size());
  };

  DemoResult result;
  result.losses.push_back(mean_loss(nullptr));
  out << nlohmann::json{{"epoch", 0}, {"loss", result.losses.back()}}.dump() << '\n';

  RmsProp opt;
  opt.lr = opts.learning_rate;
  std::vector<double*> theta = flatten(params);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= opts.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t b = 0; b < order.size(); b += opts.batch_size) {
      const std::size_t end = std::min(order.size(), b + opts.batch_size);
      const double scale = 1.0 / static_cast<double>(end - b);
      std::vector<double> grad(theta.size(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t i = b; i < end; ++i) {
        const Sample& s = data[order[i]];
        const Forward f = model.forward(params, s);
        batch_loss += f.loss * scale;
        model.backward(params, s, f, scale, grad);
      }
      ++step;
      bool finite = std::isfinite(batch_loss);
      for (double g : grad) finite = finite && std::isfinite(g);
      if (!finite) {
        std::ostringstream os;
        os << "demo-train diverged: non-finite loss or gradient at step " << step << " (epoch "
           << epoch << ")";
        fail(ErrorKind::Numeric, os.str());
      }
      opt.step(theta, grad);
    }
    std::size_t correct = 0;
    result.losses.push_back(mean_loss(epoch == opts.epochs ? &correct : nullptr));
    if (!std::isfinite(result.losses.back())) {
      std::ostringstream os;
      os << "demo-train diverged: non-finite loss after step " << step << " (epoch " << epoch << ")";
      fail(ErrorKind::Numeric, os.str());
    }
    if (epoch == opts.epochs) result.accuracy = double(correct) / double(data.size());
    out << nlohmann::json{{"epoch", epoch}, {"loss", result.losses.back()}}.dump() << '\n';
  }
  if (opts.epochs == 0) {
    std::size_t correct = 0;
    mean_loss(&correct);
    result.accuracy = double(correct) / double(data.size());
  }
  result.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  out << nlohmann::json{{"initial_loss", result.losses.front()},
                        {"final_loss", result.losses.back()},
                        {"accuracy", result.accuracy},
                        {"elapsed_ms", result.elapsed_ms}}
             .dump()
      << '\n';
  return result;
}

}  // namespace sopool
