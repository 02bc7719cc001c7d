#include "hclex/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <thread>

#include "hclex/error.hpp"
#include "hclex/rng.hpp"

namespace hclex {
namespace {

constexpr std::size_t kUnigramTableSize = 10'000'000;  // slots, unigram^0.75
constexpr char kMagic[4] = {'H', 'C', 'E', 'M'};
constexpr std::uint32_t kFormatVersion = 1;

std::vector<std::int32_t> build_unigram_table(const Vocabulary& vocab) {
  std::vector<std::int32_t> table(kUnigramTableSize);
  double total = 0.0;
  for (long long c : vocab.counts) total += std::pow(static_cast<double>(c), 0.75);
  std::size_t i = 0;
  double cum = std::pow(static_cast<double>(vocab.counts[0]), 0.75) / total;
  for (std::size_t slot = 0; slot < table.size(); ++slot) {
    table[slot] = static_cast<std::int32_t>(i);
    if (static_cast<double>(slot) / static_cast<double>(table.size()) > cum &&
        i + 1 < static_cast<std::size_t>(vocab.size())) {
      ++i;
      cum += std::pow(static_cast<double>(vocab.counts[i]), 0.75) / total;
    }
  }
  return table;
}

struct TrainPlan {
  std::vector<std::vector<int>> id_streams;
  long long total_tokens = 0;
};

TrainPlan plan_streams(const std::vector<TokenStream>& streams, const Vocabulary& vocab) {
  TrainPlan plan;
  plan.id_streams.reserve(streams.size());
  for (const auto& s : streams) {
    std::vector<int> ids;
    ids.reserve(s.size());
    for (const auto& tok : s)
      if (int id = vocab.find(tok); id >= 0) ids.push_back(id);
    plan.total_tokens += static_cast<long long>(ids.size());
    plan.id_streams.push_back(std::move(ids));
  }
  return plan;
}

struct EpochTally {
  double loss = 0.0;
  long long pairs = 0;
};

// One worker's pass over its share of streams for one epoch. `processed` is
// shared so the learning-rate schedule sees global progress in parallel mode.
void run_epoch_shard(EmbMatrix& in, EmbMatrix& out, const TrainPlan& plan,
                     const std::vector<std::int32_t>& table, const TrainConfig& cfg,
                     const Vocabulary& vocab, long long planned_total,
                     std::atomic<long long>& processed, Rng& rng, int shard, int shard_count,
                     EpochTally& tally) {
  const double inv_total = 1.0 / static_cast<double>(vocab.total_count);
  std::vector<int> sent;
  std::vector<int> negs;
  for (std::size_t si = shard; si < plan.id_streams.size();
       si += static_cast<std::size_t>(shard_count)) {
    const auto& ids = plan.id_streams[si];
    sent.clear();
    for (int id : ids) {
      processed.fetch_add(1, std::memory_order_relaxed);
      if (cfg.subsample > 0.0) {
        const double f = static_cast<double>(vocab.counts[id]) * inv_total;
        const double discard = 1.0 - std::sqrt(cfg.subsample / f);
        if (discard > 0.0 && rng.unit() < discard) continue;
      }
      sent.push_back(id);
    }
    const double progress =
        static_cast<double>(processed.load(std::memory_order_relaxed)) / planned_total;
    float lr = static_cast<float>(std::max(cfg.min_lr, cfg.initial_lr * (1.0 - progress)));
    for (std::size_t i = 0; i < sent.size(); ++i) {
      const int w_eff = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.window)));
      const std::size_t lo = i >= static_cast<std::size_t>(w_eff) ? i - w_eff : 0;
      const std::size_t hi = std::min(sent.size() - 1, i + static_cast<std::size_t>(w_eff));
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j == i) continue;
        negs.clear();
        for (int n = 0; n < cfg.negatives; ++n) {
          const int cand = table[rng.below(table.size())];
          if (cand != sent[j]) negs.push_back(cand);
        }
        tally.loss += static_cast<double>(sgns_apply<float>(in, out, sent[i], sent[j], negs, lr));
        ++tally.pairs;
      }
    }
  }
}

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_i64(std::ostream& out, std::int64_t v) {
  auto u = static_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError("embedding file: truncated");
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

std::int64_t read_i64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw DataError("embedding file: truncated");
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return static_cast<std::int64_t>(u);
}

std::vector<SimilarTerm> ranked_similarities(const EmbeddingMatrix& m, const Vocabulary& vocab,
                                             const std::string& query) {
  const int qid = vocab.find(query);
  if (qid < 0) throw DataError("similar_terms: token not in vocabulary: " + query);
  std::vector<SimilarTerm> all;
  all.reserve(static_cast<std::size_t>(vocab.size()) - 1);
  for (int id = 0; id < vocab.size(); ++id) {
    if (id == qid) continue;
    all.push_back({vocab.tokens[id], cosine(m.input.row(qid), m.input.row(id))});
  }
  std::stable_sort(all.begin(), all.end(), [](const SimilarTerm& a, const SimilarTerm& b) {
    return std::abs(a.score) > std::abs(b.score);
  });
  return all;
}

}  // namespace

Vocabulary build_vocab(const std::vector<TokenStream>& streams, int min_count) {
  if (min_count < 1) throw std::invalid_argument("build_vocab: min_count must be >= 1");
  std::unordered_map<std::string, long long> freq;
  for (const auto& s : streams)
    for (const auto& tok : s) ++freq[tok];

  std::vector<std::pair<std::string, long long>> kept;
  for (auto& [tok, c] : freq)
    if (c >= min_count) kept.emplace_back(tok, c);
  if (kept.empty()) throw DataError("empty vocabulary");

  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  Vocabulary vocab;
  vocab.min_count = min_count;
  vocab.tokens.reserve(kept.size());
  vocab.counts.reserve(kept.size());
  for (auto& [tok, c] : kept) {
    vocab.id_of.emplace(tok, static_cast<int>(vocab.tokens.size()));
    vocab.tokens.push_back(std::move(tok));
    vocab.counts.push_back(c);
    vocab.total_count += c;
  }
  return vocab;
}

void TrainConfig::validate() const {
  if (dimension < 2) throw std::invalid_argument("TrainConfig: dimension must be >= 2");
  if (window < 1 || negatives < 1 || epochs < 1 || workers < 1)
    throw std::invalid_argument("TrainConfig: window/negatives/epochs/workers must be >= 1");
  if (initial_lr <= 0.0 || min_lr <= 0.0 || min_lr > initial_lr)
    throw std::invalid_argument("TrainConfig: need 0 < min_lr <= initial_lr");
  if (subsample < 0.0) throw std::invalid_argument("TrainConfig: subsample must be >= 0");
}

EmbeddingMatrix train(const std::vector<TokenStream>& streams, const Vocabulary& vocab,
                      const TrainConfig& config, TrainStats* stats) {
  config.validate();
  if (vocab.size() == 0) throw DataError("train: empty vocabulary");

  const int v = vocab.size();
  const int d = config.dimension;
  EmbeddingMatrix m;
  m.dimension = d;
  m.input.resize(v, d);
  m.output = EmbMatrix::Zero(v, d);
  {
    Rng init_rng(mix_seed(config.seed, "init"));
    for (int r = 0; r < v; ++r)
      for (int c = 0; c < d; ++c)
        m.input(r, c) = static_cast<float>((init_rng.unit() - 0.5) / d);
  }

  const TrainPlan plan = plan_streams(streams, vocab);
  if (plan.total_tokens == 0) return m;
  const auto table = build_unigram_table(vocab);
  const long long planned_total = static_cast<long long>(config.epochs) * plan.total_tokens;
  std::atomic<long long> processed{0};

  if (stats) *stats = TrainStats{};
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.workers == 1) {
      Rng rng(mix_seed(config.seed, mix_seed(static_cast<std::uint64_t>(epoch), "epoch")));
      EpochTally tally;
      run_epoch_shard(m.input, m.output, plan, table, config, vocab, planned_total, processed, rng,
                      0, 1, tally);
      if (stats) {
        stats->epoch_mean_loss.push_back(tally.pairs ? tally.loss / tally.pairs : 0.0);
        stats->pair_count = tally.pairs;
      }
    } else {
      std::vector<std::thread> threads;
      std::vector<EpochTally> tallies(config.workers);
      for (int w = 0; w < config.workers; ++w) {
        threads.emplace_back([&, w] {
          Rng rng(mix_seed(mix_seed(config.seed, "worker"),
                           static_cast<std::uint64_t>(epoch) * 1000003u + w));
          run_epoch_shard(m.input, m.output, plan, table, config, vocab, planned_total, processed,
                          rng, w, config.workers, tallies[w]);
        });
      }
      for (auto& t : threads) t.join();
      if (stats) {
        EpochTally total;
        for (const auto& t : tallies) {
          total.loss += t.loss;
          total.pairs += t.pairs;
        }
        stats->epoch_mean_loss.push_back(total.pairs ? total.loss / total.pairs : 0.0);
        stats->pair_count = total.pairs;
      }
    }
  }
  return m;
}

std::vector<SimilarTerm> similar_by_threshold(const EmbeddingMatrix& m, const Vocabulary& vocab,
                                              const std::string& query, double t) {
  auto all = ranked_similarities(m, vocab, query);
  std::erase_if(all, [t](const SimilarTerm& s) { return std::abs(s.score) < t; });
  return all;
}

std::vector<SimilarTerm> similar_top_k(const EmbeddingMatrix& m, const Vocabulary& vocab,
                                       const std::string& query, int k) {
  auto all = ranked_similarities(m, vocab, query);
  if (k < 0) throw std::invalid_argument("similar_top_k: k must be >= 0");
  if (static_cast<std::size_t>(k) < all.size()) all.resize(static_cast<std::size_t>(k));
  return all;
}

void save_embeddings(std::ostream& out, const EmbeddingMatrix& m, const Vocabulary& vocab,
                     bool include_output) {
  out.write(kMagic, 4);
  write_u32(out, kFormatVersion);
  write_u32(out, static_cast<std::uint32_t>(vocab.size()));
  write_u32(out, static_cast<std::uint32_t>(m.dimension));
  write_u32(out, static_cast<std::uint32_t>(vocab.min_count));
  out.put(include_output ? '\1' : '\0');
  for (int id = 0; id < vocab.size(); ++id) {
    write_u32(out, static_cast<std::uint32_t>(vocab.tokens[id].size()));
    out.write(vocab.tokens[id].data(), static_cast<std::streamsize>(vocab.tokens[id].size()));
    write_i64(out, vocab.counts[id]);
  }
  const auto bytes = static_cast<std::streamsize>(sizeof(float)) * m.input.size();
  out.write(reinterpret_cast<const char*>(m.input.data()), bytes);
  if (include_output) out.write(reinterpret_cast<const char*>(m.output.data()), bytes);
  if (!out) throw DataError("embedding file: write failed");
}

LoadedEmbeddings load_embeddings(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("embedding file: bad magic");
  if (const auto version = read_u32(in); version != kFormatVersion)
    throw DataError("embedding file: unsupported version " + std::to_string(version));
  const auto v = read_u32(in);
  const auto d = read_u32(in);
  const auto min_count = read_u32(in);
  const int has_output = in.get();
  if (has_output != 0 && has_output != 1) throw DataError("embedding file: bad output flag");

  LoadedEmbeddings loaded;
  loaded.vocab.min_count = static_cast<int>(min_count);
  loaded.vocab.tokens.reserve(v);
  loaded.vocab.counts.reserve(v);
  for (std::uint32_t id = 0; id < v; ++id) {
    const auto len = read_u32(in);
    std::string tok(len, '\0');
    if (!in.read(tok.data(), len)) throw DataError("embedding file: truncated");
    loaded.vocab.id_of.emplace(tok, static_cast<int>(id));
    loaded.vocab.tokens.push_back(std::move(tok));
    const long long c = read_i64(in);
    loaded.vocab.counts.push_back(c);
    loaded.vocab.total_count += c;
  }
  loaded.matrix.dimension = static_cast<int>(d);
  loaded.matrix.input.resize(v, d);
  const auto bytes = static_cast<std::streamsize>(sizeof(float)) * loaded.matrix.input.size();
  if (!in.read(reinterpret_cast<char*>(loaded.matrix.input.data()), bytes))
    throw DataError("embedding file: truncated");
  if (has_output) {
    loaded.matrix.output.resize(v, d);
    if (!in.read(reinterpret_cast<char*>(loaded.matrix.output.data()), bytes))
      throw DataError("embedding file: truncated");
  } else {
    loaded.matrix.output = EmbMatrix::Zero(v, d);
  }
  return loaded;
}

void export_embeddings_text(std::ostream& out, const EmbeddingMatrix& m, const Vocabulary& vocab) {
  const auto old_precision = out.precision(8);
  for (int id = 0; id < vocab.size(); ++id) {
    out << vocab.tokens[id];
    for (int c = 0; c < m.dimension; ++c) out << ' ' << m.input(id, c);
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace hclex
