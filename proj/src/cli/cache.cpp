#include "gammalab/cli/cache.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "gammalab/exact.hpp"
#include "gammalab/mp.hpp"

namespace gammalab::cli {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kMagic = "gammalab-cache 1";

std::string checksum_input(CacheKind kind, const std::string& key, const std::string& value) {
  std::string s(kind_name(kind));
  s += '\n';
  s += key;
  s += '\n';
  s += value;
  return s;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

std::string join_bounded(const mp::Bounded& b) {
  return b.value.to_exact_string() + "|" + b.err.to_exact_string();
}

mp::Bounded parse_bounded(const std::string& text) {
  const auto bar = text.find('|');
  if (bar == std::string::npos) throw std::invalid_argument("bad bounded entry");
  return {mp::BigFloat::from_exact_string(text.substr(0, bar)),
          mp::ErrBound::from_exact_string(text.substr(bar + 1))};
}

// Keys look like "<prefix><number>" or "p<prec>_upto_<n>".
std::optional<unsigned long> number_after(const std::string& key, const std::string& prefix) {
  if (key.rfind(prefix, 0) != 0) return std::nullopt;
  const std::string rest = key.substr(prefix.size());
  if (rest.empty() || !std::all_of(rest.begin(), rest.end(), ::isdigit)) return std::nullopt;
  return std::stoul(rest);
}

}  // namespace

std::string_view kind_name(CacheKind kind) {
  switch (kind) {
    case CacheKind::d_n: return "d_n";
    case CacheKind::stirling_row: return "stirling_row";
    case CacheKind::log_factorial: return "log_factorial";
    case CacheKind::constant: return "constant";
  }
  return "unknown";
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

DiskCache::DiskCache(fs::path root) : root_(std::move(root)) {}

fs::path DiskCache::path_for(CacheKind kind, const std::string& key) const {
  return root_ / std::string(kind_name(kind)) / key;
}

std::optional<std::string> DiskCache::read(CacheKind kind, const std::string& key) {
  std::ifstream in(path_for(kind, key), std::ios::binary);
  if (!in) {
    ++stats_.misses;
    return std::nullopt;
  }
  std::string magic, sum_line;
  std::getline(in, magic);
  std::getline(in, sum_line);
  std::ostringstream rest;
  rest << in.rdbuf();
  const std::string value = rest.str();
  if (magic != kMagic || sum_line != "sha256 " + sha256_hex(checksum_input(kind, key, value))) {
    ++stats_.corrupt;
    return std::nullopt;
  }
  ++stats_.hits;
  return value;
}

void DiskCache::write(CacheKind kind, const std::string& key, const std::string& value) {
  const fs::path target = path_for(kind, key);
  fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << kMagic << '\n' << "sha256 " << sha256_hex(checksum_input(kind, key, value)) << '\n' << value;
    if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
  }
  fs::rename(tmp, target);
  ++stats_.written;
}

std::vector<std::string> DiskCache::keys(CacheKind kind) const {
  std::vector<std::string> out;
  const fs::path dir = root_ / std::string(kind_name(kind));
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && !name.ends_with(".tmp")) out.push_back(name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t load_tables(DiskCache& cache) {
  std::size_t used = 0;

  // d_n: the longest valid table wins.
  std::optional<unsigned long> best;
  for (const std::string& key : cache.keys(CacheKind::d_n)) {
    const auto upto = number_after(key, "upto_");
    if (upto && (!best || *upto > *best)) best = upto;
  }
  if (best) {
    if (auto text = cache.read(CacheKind::d_n, "upto_" + std::to_string(*best))) {
      std::vector<Nat> table;
      for (const std::string& line : split(*text, '\n')) table.emplace_back(line);
      exact::seed_lcm_table(table);
      ++used;
    }
  }

  // Stirling rows: the contiguous prefix 0, 1, 2, ...
  std::vector<exact::StirlingRow> rows;
  for (index_t m = 0;; ++m) {
    auto text = cache.read(CacheKind::stirling_row, "m_" + std::to_string(m));
    if (!text) break;
    exact::StirlingRow row;
    row.m = m;
    for (const std::string& v : split(*text, ' ')) row.values.emplace_back(v);
    if (row.values.size() != m + 1) break;
    rows.push_back(std::move(row));
  }
  if (!rows.empty()) {
    exact::seed_stirling_table(rows);
    used += rows.size();
  }

  // ln(m!) tables per precision.
  std::map<long, unsigned long> lf_best;
  for (const std::string& key : cache.keys(CacheKind::log_factorial)) {
    const auto sep = key.find("_upto_");
    if (key.size() < 2 || key[0] != 'p' || sep == std::string::npos) continue;
    const auto prec = number_after(key.substr(0, sep), "p");
    const auto upto = number_after(key.substr(sep), "_upto_");
    if (!prec || !upto) continue;
    auto& slot = lf_best[static_cast<long>(*prec)];
    slot = std::max(slot, *upto);
  }
  for (const auto& [prec, upto] : lf_best) {
    const std::string key = "p" + std::to_string(prec) + "_upto_" + std::to_string(upto);
    auto text = cache.read(CacheKind::log_factorial, key);
    if (!text) continue;
    try {
      std::vector<mp::Bounded> table;
      for (const std::string& line : split(*text, '\n')) table.push_back(parse_bounded(line));
      mp::seed_log_factorial_table(prec, table);
      ++used;
    } catch (const std::exception&) {
    }
  }

  for (const std::string& key : cache.keys(CacheKind::constant)) {
    const auto prec = number_after(key, "gamma_p");
    if (!prec) continue;
    auto text = cache.read(CacheKind::constant, key);
    if (!text) continue;
    try {
      mp::seed_euler_gamma(static_cast<long>(*prec), parse_bounded(*text));
      ++used;
    } catch (const std::exception&) {
    }
  }
  return used;
}

void store_tables(DiskCache& cache) {
  const std::vector<Nat> lcm = exact::lcm_table_snapshot();
  if (!lcm.empty()) {
    std::string text;
    for (std::size_t i = 0; i < lcm.size(); ++i) {
      if (i) text += '\n';
      text += lcm[i].get_str();
    }
    cache.write(CacheKind::d_n, "upto_" + std::to_string(lcm.size() - 1), text);
  }

  for (const exact::StirlingRow& row : exact::stirling_table_snapshot()) {
    std::string text;
    for (std::size_t k = 0; k < row.values.size(); ++k) {
      if (k) text += ' ';
      text += row.values[k].get_str();
    }
    cache.write(CacheKind::stirling_row, "m_" + std::to_string(row.m), text);
  }

  for (mp::prec_t prec : mp::log_factorial_cached_precisions()) {
    const std::vector<mp::Bounded> table = mp::log_factorial_table_snapshot(prec);
    if (table.empty()) continue;
    std::string text;
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (i) text += '\n';
      text += join_bounded(table[i]);
    }
    cache.write(CacheKind::log_factorial,
                "p" + std::to_string(prec) + "_upto_" + std::to_string(table.size() - 1), text);
  }

  for (mp::prec_t prec : mp::euler_gamma_cached_precisions()) {
    if (auto g = mp::euler_gamma_cached(prec)) {
      cache.write(CacheKind::constant, "gamma_p" + std::to_string(prec), join_bounded(*g));
    }
  }
}

}  // namespace gammalab::cli
