#pragma once

// CSV, SVG and metadata emission. Files are written to a temporary sibling
// and renamed into place.

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lunasim/config.hpp"
#include "lunasim/engine.hpp"

namespace lunasim {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// SHA-1 of "blob <size>\0<content>", as git computes object ids.
inline std::string git_blob_sha1(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw OutputError("sha1: cannot allocate digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 && EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw OutputError("sha1: digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[md[i] >> 4];
    hex += kHex[md[i] & 0xF];
  }
  return hex;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw OutputError("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes `content` to `path` so that readers see either the old file or the
/// complete new one.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw OutputError("write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw OutputError("cannot rename into " + path.string());
  }
}

struct NamedAggregate {
  std::string policy;
  const Aggregate* agg;
};

inline constexpr std::string_view kSummaryHeader = "policy,t,mean_cum_regret,std_cum_regret,mean_variation,epochs\n";
inline constexpr std::string_view kDetailHeader = "t,w,q,xi,profit,benchmark,regret_cum,epoch,phase\n";

inline std::string summary_csv(const std::vector<NamedAggregate>& runs) {
  std::string out(kSummaryHeader);
  for (const auto& [policy, agg] : runs) {
    for (std::size_t i = 0; i < agg->mean_cum_regret.size(); ++i) {
      out += policy;
      out += ',';
      out += std::to_string(i + 1);
      for (double v : {agg->mean_cum_regret[i], agg->std_cum_regret[i], agg->mean_variation[i], agg->mean_epochs[i]}) {
        out += ',';
        out += format_double(v);
      }
      out += '\n';
    }
  }
  return out;
}

inline std::string detail_csv(const Trajectory& tr) {
  std::string out(kDetailHeader);
  const auto& cum = tr.ledger.cumulative();
  for (std::size_t i = 0; i < tr.rounds.size(); ++i) {
    const auto& r = tr.rounds[i];
    out += std::to_string(r.t);
    for (double v : {r.w, r.q, r.xi, r.profit, r.benchmark, cum[i]}) {
      out += ',';
      out += format_double(v);
    }
    out += ',' + std::to_string(r.epoch) + ',' + to_string(r.phase) + '\n';
  }
  return out;
}

/// Standalone log-log plot of mean cumulative regret, one polyline per policy.
inline std::string regret_svg(const std::vector<NamedAggregate>& runs, const std::string& title) {
  constexpr double W = 720, H = 480, L = 70, R = 160, Tp = 40, B = 50;
  double ymin = kInf, ymax = 0.0;
  std::size_t T = 1;
  for (const auto& r : runs) {
    T = std::max(T, r.agg->mean_cum_regret.size());
    for (double v : r.agg->mean_cum_regret)
      if (v > 0.0) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
      }
  }
  if (!(ymax > 0.0)) ymin = ymax = 1.0;
  const double lx0 = 0.0, lx1 = std::max(std::log10(static_cast<double>(T)), 1.0);
  double ly0 = std::floor(std::log10(ymin)), ly1 = std::ceil(std::log10(ymax));
  if (ly1 <= ly0) ly1 = ly0 + 1.0;
  const auto px = [&](double lx) { return L + (lx - lx0) / (lx1 - lx0) * (W - L - R); };
  const auto py = [&](double ly) { return H - B - (ly - ly0) / (ly1 - ly0) * (H - Tp - B); };
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n", W, H,
                W, H);
  out += buf;
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">", L);
  out += buf;
  for (char ch : title) out += ch == '<' ? std::string("&lt;") : ch == '&' ? std::string("&amp;") : std::string(1, ch);
  out += "</text>\n";
  std::snprintf(buf, sizeof buf, "<path d=\"M%.1f %.1f V%.1f H%.1f\" fill=\"none\" stroke=\"black\"/>\n", px(lx0), py(ly1),
                py(ly0), px(lx1));
  out += buf;
  for (int d = 0; d <= static_cast<int>(lx1); ++d) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">1e%d</text>\n",
                  px(d), H - B + 16, d);
    out += buf;
  }
  for (int d = static_cast<int>(ly0); d <= static_cast<int>(ly1); ++d) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e%d</text>\n",
                  L - 6, py(d) + 4, d);
    out += buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">t</text>\n",
                px(0.5 * (lx0 + lx1)), H - 12);
  out += buf;

  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& series = runs[k].agg->mean_cum_regret;
    const char* color = kColors[k % (sizeof kColors / sizeof *kColors)];
    out += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"";
    out += color;
    out += "\" points=\"";
    // About 400 points evenly spaced in log t.
    double last = -1.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
      const double lt = std::log10(static_cast<double>(i + 1));
      if (lt - last < (lx1 - lx0) / 400.0 && i + 1 != series.size()) continue;
      if (!(series[i] > 0.0)) continue;
      last = lt;
      std::snprintf(buf, sizeof buf, "%.1f,%.1f ", px(lt), py(std::log10(series[i])));
      out += buf;
    }
    out += "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"12\" fill=\"%s\">%s</text>\n",
                  W - R + 10, Tp + 18.0 * static_cast<double>(k + 1), color, runs[k].policy.c_str());
    out += buf;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace lunasim
