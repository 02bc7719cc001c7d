#include "hclex/run_config.hpp"

#include <charconv>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "hclex/csv.hpp"
#include "hclex/error.hpp"
#include "hclex/rng.hpp"

namespace hclex {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* begin = value.data();
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end)
    throw DataError("config: bad value for " + std::string(key) + ": '" + std::string(value) + "'");
  return out;
}

// GCC 11 lacks from_chars overloads for double in some configs; strtod is fine.
double parse_real(std::string_view key, std::string_view value) {
  const std::string s(value);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw DataError("config: bad value for " + std::string(key) + ": '" + s + "'");
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw DataError("config: bad value for " + std::string(key) + ": '" + std::string(value) + "'");
}

std::vector<std::string> parse_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  const std::string s(value);
  while (start <= s.size()) {
    const auto pos = s.find(',', start);
    const auto item = trim(std::string_view(s).substr(
        start, pos == std::string::npos ? std::string::npos : pos - start));
    if (!item.empty()) out.emplace_back(item);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

}  // namespace

void RunConfig::apply(std::string_view key, std::string_view value) {
  if (key == "seed")
    seed = parse_number<std::uint64_t>(key, value);
  else if (key == "workers")
    workers = parse_number<int>(key, value);
  else if (key == "min_count")
    min_count = parse_number<int>(key, value);
  else if (key == "phrase_min_count")
    phrase_min_count = parse_number<int>(key, value);
  else if (key == "phrase_threshold")
    phrase_threshold = parse_real(key, value);
  else if (key == "phrase_passes")
    phrase_passes = parse_number<int>(key, value);
  else if (key == "dimension")
    dimension = parse_number<int>(key, value);
  else if (key == "window")
    window = parse_number<int>(key, value);
  else if (key == "negatives")
    negatives = parse_number<int>(key, value);
  else if (key == "epochs")
    epochs = parse_number<int>(key, value);
  else if (key == "initial_lr")
    initial_lr = parse_real(key, value);
  else if (key == "min_lr")
    min_lr = parse_real(key, value);
  else if (key == "subsample")
    subsample = parse_real(key, value);
  else if (key == "expand_threshold")
    expand_threshold = parse_real(key, value);
  else if (key == "include_antonyms")
    include_antonyms = parse_bool(key, value);
  else if (key == "k_min")
    k_min = parse_number<int>(key, value);
  else if (key == "k_max")
    k_max = parse_number<int>(key, value);
  else if (key == "cluster_k")
    cluster_k = parse_number<int>(key, value);
  else if (key == "kmeans_restarts")
    kmeans_restarts = parse_number<int>(key, value);
  else if (key == "kmeans_max_iters")
    kmeans_max_iters = parse_number<int>(key, value);
  else if (key == "bucket")
    bucket = std::string(value);
  else if (key == "exclude_subcategories")
    exclude_subcategories = parse_list(value);
  else if (key == "neg_ratio")
    neg_ratio = parse_number<int>(key, value);
  else if (key == "train_frac")
    train_frac = parse_real(key, value);
  else
    throw DataError("config: unknown key '" + std::string(key) + "'");
}

void RunConfig::load(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw DataError("config line " + std::to_string(lineno) + ": expected key = value");
    try {
      apply(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    } catch (const DataError& e) {
      throw DataError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void RunConfig::save(std::ostream& out) const {
  out << "seed = " << seed << '\n';
  out << "workers = " << workers << '\n';
  out << "min_count = " << min_count << '\n';
  out << "phrase_min_count = " << phrase_min_count << '\n';
  out << "phrase_threshold = " << csv::dtos(phrase_threshold) << '\n';
  out << "phrase_passes = " << phrase_passes << '\n';
  out << "dimension = " << dimension << '\n';
  out << "window = " << window << '\n';
  out << "negatives = " << negatives << '\n';
  out << "epochs = " << epochs << '\n';
  out << "initial_lr = " << csv::dtos(initial_lr) << '\n';
  out << "min_lr = " << csv::dtos(min_lr) << '\n';
  out << "subsample = " << csv::dtos(subsample) << '\n';
  out << "expand_threshold = " << csv::dtos(expand_threshold) << '\n';
  out << "include_antonyms = " << (include_antonyms ? "true" : "false") << '\n';
  out << "k_min = " << k_min << '\n';
  out << "k_max = " << k_max << '\n';
  out << "cluster_k = " << cluster_k << '\n';
  out << "kmeans_restarts = " << kmeans_restarts << '\n';
  out << "kmeans_max_iters = " << kmeans_max_iters << '\n';
  out << "bucket = " << bucket << '\n';
  out << "exclude_subcategories = " << join(exclude_subcategories) << '\n';
  out << "neg_ratio = " << neg_ratio << '\n';
  out << "train_frac = " << csv::dtos(train_frac) << '\n';
}

std::uint64_t stage_seed(const RunConfig& config, std::string_view stage) {
  return mix_seed(config.seed, stage);
}

}  // namespace hclex
