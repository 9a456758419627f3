#include "gelkit/functionality.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "gelkit/errors.hpp"
#include "gelkit/numeric.hpp"

namespace gelkit {

FunctionalityDistribution::FunctionalityDistribution(
    std::vector<std::pair<int, double>> entries, bool normalize,
    int max_functionality) {
  std::map<int, double> merged;
  for (const auto& [m, f] : entries) {
    if (m < 1)
      throw DomainError("functionality must be >= 1, got m=" +
                        std::to_string(m));
    if (m > max_functionality)
      throw DomainError("functionality m=" + std::to_string(m) +
                        " exceeds bound " + std::to_string(max_functionality));
    if (!(f >= 0.0) || !std::isfinite(f))
      throw DomainError("fraction for m=" + std::to_string(m) +
                        " must be finite and >= 0");
    merged[m] += f;
  }

  KahanAccumulator total;
  for (const auto& [m, f] : merged) total.add(f);
  double sum = total.value();
  if (!(sum > 0.0))
    throw DomainError("mixture has no positive fractions");
  if (!normalize && std::abs(sum - 1.0) > 1e-9)
    throw DomainError("mixture fractions sum to " + std::to_string(sum) +
                      ", expected 1 (pass normalize to rescale)");

  for (const auto& [m, f] : merged) {
    if (f > 0.0) {
      entries_.emplace_back(m, f / sum);
      max_m_ = m;
    }
  }
  if (entries_.empty())
    throw DomainError("mixture has no positive fractions");
}

double FunctionalityDistribution::fraction(int m) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), m,
      [](const std::pair<int, double>& e, int key) { return e.first < key; });
  if (it != entries_.end() && it->first == m) return it->second;
  return 0.0;
}

double FunctionalityDistribution::partial_moment(int order) const {
  if (order < 1 || order > 3)
    throw DomainError("partial_moment order must be 1..3");
  KahanAccumulator acc;
  for (const auto& [m, f] : entries_) {
    double p = m;
    for (int j = 1; j < order; ++j) p *= m;
    acc.add(p * f);
  }
  return acc.value();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::pair<int, double>> parse_pairs(std::string_view text) {
  std::vector<std::pair<int, double>> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string_view item = text.substr(
        pos, comma == std::string_view::npos ? std::string_view::npos
                                             : comma - pos);
    item = trim(item);
    if (!item.empty()) {
      std::size_t colon = item.find(':');
      if (colon == std::string_view::npos)
        throw DomainError("mixture entry '" + std::string(item) +
                          "' is not of the form m:f");
      std::string_view mpart = trim(item.substr(0, colon));
      std::string_view fpart = trim(item.substr(colon + 1));
      int m = 0;
      auto [mp, mec] = std::from_chars(mpart.data(), mpart.data() + mpart.size(), m);
      if (mec != std::errc() || mp != mpart.data() + mpart.size())
        throw DomainError("mixture entry has bad functionality '" +
                          std::string(mpart) + "'");
      std::string fstr(fpart);
      char* endp = nullptr;
      double f = std::strtod(fstr.c_str(), &endp);
      if (fstr.empty() || endp != fstr.c_str() + fstr.size())
        throw DomainError("mixture entry has bad fraction '" + fstr + "'");
      out.emplace_back(m, f);
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<std::pair<int, double>> parse_json_object(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError(std::string("mixture JSON parse failed: ") + e.what());
  }
  if (!j.is_object())
    throw DomainError("mixture JSON must be an object of m -> fraction");
  std::vector<std::pair<int, double>> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    int m = 0;
    const std::string& key = it.key();
    auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), m);
    if (ec != std::errc() || p != key.data() + key.size())
      throw DomainError("mixture JSON key '" + key +
                        "' is not an integer functionality");
    if (!it.value().is_number())
      throw DomainError("mixture JSON value for m=" + key +
                        " is not a number");
    out.emplace_back(m, it.value().get<double>());
  }
  return out;
}

}  // namespace

FunctionalityDistribution FunctionalityDistribution::parse(
    std::string_view text, bool normalize) {
  std::string_view body = trim(text);
  if (body.empty()) throw DomainError("empty mixture");
  std::vector<std::pair<int, double>> pairs =
      body.front() == '{' ? parse_json_object(body) : parse_pairs(body);
  return FunctionalityDistribution(std::move(pairs), normalize);
}

}  // namespace gelkit
