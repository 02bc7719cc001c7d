#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hclex/text.hpp"

namespace hclex {

template <typename Scalar>
using EmbMatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using RowVecT = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
using EmbMatrix = EmbMatrixT<float>;

struct Vocabulary {
  std::unordered_map<std::string, int> id_of;  // ids dense in [0, V)
  std::vector<std::string> tokens;             // id -> token
  std::vector<long long> counts;               // id -> corpus frequency
  long long total_count = 0;                   // sum of retained counts
  int min_count = 1;

  int size() const { return static_cast<int>(tokens.size()); }
  int find(std::string_view token) const {
    auto it = id_of.find(std::string(token));
    return it == id_of.end() ? -1 : it->second;
  }
};

// Ids in descending frequency order, ties lexicographic. Throws DataError
// ("empty vocabulary") if nothing survives the min_count filter.
Vocabulary build_vocab(const std::vector<TokenStream>& streams, int min_count);

struct TrainConfig {
  int dimension = 100;
  int window = 5;           // effective window uniform in [1, window] per center
  int negatives = 5;
  int epochs = 5;
  double initial_lr = 0.025;
  double min_lr = 1e-4;
  double subsample = 1e-3;  // discard prob 1 - sqrt(s/f); 0 disables
  std::uint64_t seed = 42;
  int workers = 1;          // >1: lock-free shared updates, not bit-deterministic

  void validate() const;
};

struct EmbeddingMatrix {
  EmbMatrix input;   // V x D
  EmbMatrix output;  // V x D
  int dimension = 0;
};

struct TrainStats {
  std::vector<double> epoch_mean_loss;  // negative SGNS objective per pair
  long long pair_count = 0;             // (center, context) pairs in final epoch
};

EmbeddingMatrix train(const std::vector<TokenStream>& streams, const Vocabulary& vocab,
                      const TrainConfig& config, TrainStats* stats = nullptr);

// --- SGNS kernels -----------------------------------------------------------
// Loss for one (center, context, negatives) triple:
//   L = -log sigmoid(u.v_ctx) - sum_i log sigmoid(-u.v_neg_i)
// with u an input row and v output rows. Templated so tests can run the
// finite-difference oracle in double.

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  return Scalar(1) / (Scalar(1) + std::exp(-x));
}

template <typename Scalar>
Scalar sgns_triple_loss(const EmbMatrixT<Scalar>& in, const EmbMatrixT<Scalar>& out, int center,
                        int context, const std::vector<int>& negatives) {
  const Scalar eps = std::numeric_limits<Scalar>::min();
  Scalar loss = -std::log(sigmoid<Scalar>(in.row(center).dot(out.row(context))) + eps);
  for (int n : negatives)
    loss -= std::log(sigmoid<Scalar>(-in.row(center).dot(out.row(n))) + eps);
  return loss;
}

template <typename Scalar>
struct SgnsGrad {
  RowVecT<Scalar> center;                  // dL/d in[center]
  RowVecT<Scalar> context;                 // dL/d out[context]
  std::vector<RowVecT<Scalar>> negatives;  // dL/d out[neg_i]
};

template <typename Scalar>
SgnsGrad<Scalar> sgns_triple_grad(const EmbMatrixT<Scalar>& in, const EmbMatrixT<Scalar>& out,
                                  int center, int context, const std::vector<int>& negatives) {
  SgnsGrad<Scalar> g;
  const auto u = in.row(center);
  const Scalar gp = sigmoid<Scalar>(u.dot(out.row(context))) - Scalar(1);
  g.center = gp * out.row(context);
  g.context = gp * u;
  g.negatives.reserve(negatives.size());
  for (int n : negatives) {
    const Scalar gn = sigmoid<Scalar>(u.dot(out.row(n)));
    g.center += gn * out.row(n);
    g.negatives.push_back(gn * u);
  }
  return g;
}

// One SGD step at learning rate lr, reference update order: all output rows
// first (against the unmodified input row), then the input row once. Returns
// the loss at the pre-update parameters. The trainer runs exactly this.
template <typename Scalar>
Scalar sgns_apply(EmbMatrixT<Scalar>& in, EmbMatrixT<Scalar>& out, int center, int context,
                  const std::vector<int>& negatives, Scalar lr) {
  const Scalar eps = std::numeric_limits<Scalar>::min();
  RowVecT<Scalar> acc = RowVecT<Scalar>::Zero(in.cols());
  Scalar loss = 0;
  {
    const Scalar s = sigmoid<Scalar>(in.row(center).dot(out.row(context)));
    loss -= std::log(s + eps);
    const Scalar g = (Scalar(1) - s) * lr;
    acc += g * out.row(context);
    out.row(context) += g * in.row(center);
  }
  for (int n : negatives) {
    const Scalar s = sigmoid<Scalar>(in.row(center).dot(out.row(n)));
    loss -= std::log(Scalar(1) - s + eps);
    const Scalar g = -s * lr;
    acc += g * out.row(n);
    out.row(n) += g * in.row(center);
  }
  in.row(center) += acc;
  return loss;
}

// --- queries ----------------------------------------------------------------

// Always computed in double; throws std::invalid_argument on a zero vector.
template <typename DerivedA, typename DerivedB>
double cosine(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  const double na = a.template cast<double>().norm();
  const double nb = b.template cast<double>().norm();
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine: zero vector");
  const double value = a.template cast<double>().dot(b.template cast<double>()) / (na * nb);
  return std::clamp(value, -1.0, 1.0);
}

struct SimilarTerm {
  std::string token;
  double score;  // signed cosine
  bool operator==(const SimilarTerm&) const = default;
};

// Signed cosines against input vectors; query excluded; sorted by |score|
// descending (ties by vocab id). Threshold mode keeps |score| >= t.
std::vector<SimilarTerm> similar_by_threshold(const EmbeddingMatrix& m, const Vocabulary& vocab,
                                              const std::string& query, double t);
std::vector<SimilarTerm> similar_top_k(const EmbeddingMatrix& m, const Vocabulary& vocab,
                                       const std::string& query, int k);

// --- persistence ------------------------------------------------------------
// Binary: magic "HCEM", version, V, D, min_count, output flag, vocabulary
// block (length-prefixed tokens + counts), row-major little-endian f32 data.

void save_embeddings(std::ostream& out, const EmbeddingMatrix& m, const Vocabulary& vocab,
                     bool include_output = true);
struct LoadedEmbeddings {
  EmbeddingMatrix matrix;
  Vocabulary vocab;
};
LoadedEmbeddings load_embeddings(std::istream& in);

// `token v1 v2 ... vD` per line (input vectors).
void export_embeddings_text(std::ostream& out, const EmbeddingMatrix& m, const Vocabulary& vocab);

}  // namespace hclex
