#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>

#include "whatif/agents.hpp"

namespace whatif::agents {

std::vector<float> HashedEmbedding::embed(const std::string& text) const {
  std::vector<float> v(dim_, 0.0f);
  std::uint64_t h = 0;
  bool in_word = false;
  auto flush = [&] {
    if (in_word) v[h % dim_] += 1.0f;
    in_word = false;
  };
  for (const char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (!std::isalnum(c)) {
      flush();
      continue;
    }
    if (!in_word) {
      h = 14695981039346656037ull;  // FNV-1a offset basis
      in_word = true;
    }
    h ^= static_cast<unsigned char>(std::tolower(c));
    h *= 1099511628211ull;
  }
  flush();
  return v;
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
  double dot = 0, na = 0, nb = 0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<double> similarity_scores_serial(const std::vector<float>& query,
                                             const std::vector<std::vector<float>>& rows) {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = cosine(query, rows[i]);
  return out;
}

std::vector<double> similarity_scores(const std::vector<float>& query,
                                      const std::vector<std::vector<float>>& rows) {
  std::vector<double> out(rows.size());
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static) if (n > 256)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = cosine(query, rows[i]);
  return out;
}

std::string_view to_string(SelectionMode m) {
  return m == SelectionMode::Random ? "random" : "nearest";
}

std::string_view to_string(Distribution d) {
  switch (d) {
    case Distribution::In: return "in";
    case Distribution::Out: return "out";
    case Distribution::Any: return "any";
  }
  return "?";
}

SelectionMode parse_selection_mode(std::string_view s) {
  if (s == "random") return SelectionMode::Random;
  if (s == "nearest") return SelectionMode::Nearest;
  throw Error(ErrorKind::DataFormat, "unknown selection mode '" + std::string(s) + "'");
}

Distribution parse_distribution(std::string_view s) {
  if (s == "in") return Distribution::In;
  if (s == "out") return Distribution::Out;
  if (s == "any") return Distribution::Any;
  throw Error(ErrorKind::DataFormat, "unknown distribution '" + std::string(s) + "'");
}

std::vector<Example> select_examples(const std::vector<Example>& pool, const Example& query,
                                     std::size_t k, SelectionMode mode, Distribution distribution,
                                     std::uint64_t seed, const EmbeddingClient& embedder) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const Example& e = pool[i];
    bool ok = false;
    switch (distribution) {
      case Distribution::In: ok = e.type == query.type && e.id != query.id; break;
      case Distribution::Out: ok = e.type != query.type; break;
      case Distribution::Any: ok = e.id != query.id; break;
    }
    if (ok) eligible.push_back(i);
  }
  if (eligible.size() < k) {
    throw Error(ErrorKind::PoolExhausted, std::to_string(eligible.size()) +
                                              " eligible examples, " + std::to_string(k) +
                                              " requested");
  }
  if (k == 0) return {};

  if (mode == SelectionMode::Random) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = eligible.size(); i-- > 1;) {
      std::swap(eligible[i], eligible[rng() % (i + 1)]);
    }
  } else {
    const auto q = embedder.embed(query.question);
    std::vector<std::vector<float>> rows;
    rows.reserve(eligible.size());
    for (std::size_t i : eligible) rows.push_back(embedder.embed(pool[i].question));
    const auto scores = similarity_scores(q, rows);
    std::vector<std::size_t> order(eligible.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<std::size_t> sorted;
    for (std::size_t o : order) sorted.push_back(eligible[o]);
    eligible = std::move(sorted);
  }
  std::vector<Example> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(pool[eligible[i]]);
  return out;
}

}  // namespace whatif::agents
