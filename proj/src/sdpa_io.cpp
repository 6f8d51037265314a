#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathcert/conic.hpp"

namespace pathcert {

namespace {

using Term = SdpProblem::Term;
using Kind = SdpProblem::BlockKind;

int kind_rank(Kind k) { return k == Kind::Psd ? 0 : (k == Kind::NonNeg ? 1 : 2); }

bool term_order(const Term& a, const Term& b) {
  return std::tuple(kind_rank(a.kind), a.block, a.i, a.j) <
         std::tuple(kind_rank(b.kind), b.block, b.i, b.j);
}

std::vector<Term> canonical_terms(const std::vector<Term>& in, int nn_base) {
  std::vector<Term> work;
  for (Term t : in) {
    if (t.kind == Kind::Psd && t.i > t.j) std::swap(t.i, t.j);
    if (t.kind == Kind::Free) {
      // split u = u+ - u- into a trailing nonnegative pair
      work.push_back(
          SdpProblem::nonneg_entry(nn_base + 2 * t.i, t.coeff));
      work.push_back(
          SdpProblem::nonneg_entry(nn_base + 2 * t.i + 1, -t.coeff));
    } else {
      work.push_back(t);
    }
  }
  std::sort(work.begin(), work.end(), term_order);
  std::vector<Term> out;
  for (const Term& t : work) {
    if (!out.empty() && out.back().kind == t.kind &&
        out.back().block == t.block && out.back().i == t.i &&
        out.back().j == t.j) {
      out.back().coeff += t.coeff;
    } else {
      out.push_back(t);
    }
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](const Term& t) { return t.coeff == 0.0; }),
            out.end());
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Splits separators the SDPA family of tools tolerate into plain spaces.
std::string clean_line(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')' || c == '\r')
      c = ' ';
  return s;
}

}  // namespace

SdpProblem canonicalize(const SdpProblem& p) {
  p.validate();
  SdpProblem out;
  out.psd_sizes = p.psd_sizes;
  out.nonneg_size = p.nonneg_size + 2 * p.free_size;
  out.free_size = 0;
  for (const auto& row : p.rows)
    out.rows.push_back({canonical_terms(row.terms, p.nonneg_size), row.rhs});
  out.objective = canonical_terms(p.objective, p.nonneg_size);
  return out;
}

std::string export_standard(const SdpProblem& problem) {
  const SdpProblem p = canonicalize(problem);
  std::ostringstream os;
  os << "*pathcert sdpa-sparse v1\n";
  const int m = static_cast<int>(p.rows.size());
  const int nblocks =
      static_cast<int>(p.psd_sizes.size()) + (p.nonneg_size > 0 ? 1 : 0);
  os << m << "\n" << nblocks << "\n";
  for (std::size_t i = 0; i < p.psd_sizes.size(); ++i)
    os << (i ? " " : "") << p.psd_sizes[i];
  if (p.nonneg_size > 0)
    os << (p.psd_sizes.empty() ? "" : " ") << -p.nonneg_size;
  os << "\n";
  for (int r = 0; r < m; ++r) os << (r ? " " : "") << fmt(p.rows[r].rhs);
  os << "\n";
  const int nn_block = static_cast<int>(p.psd_sizes.size()) + 1;
  auto emit = [&](int matno, const Term& t) {
    if (t.kind == Kind::Psd)
      os << matno << " " << t.block + 1 << " " << t.i + 1 << " " << t.j + 1
         << " " << fmt(t.coeff) << "\n";
    else
      os << matno << " " << nn_block << " " << t.i + 1 << " " << t.i + 1 << " "
         << fmt(t.coeff) << "\n";
  };
  for (const Term& t : p.objective) emit(0, t);
  for (int r = 0; r < m; ++r)
    for (const Term& t : p.rows[r].terms) emit(r + 1, t);
  return os.str();
}

SdpProblem import_standard(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  auto next_data_line = [&]() -> std::string {
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      if (line[0] == '*' || line[0] == '"') continue;
      return clean_line(line);
    }
    throw std::invalid_argument("sdpa import: truncated document");
  };

  int m = 0, nblocks = 0;
  {
    std::istringstream(next_data_line()) >> m;
    std::istringstream(next_data_line()) >> nblocks;
  }
  if (m < 0 || nblocks < 0)
    throw std::invalid_argument("sdpa import: negative counts");

  SdpProblem p;
  // block table: positive sizes are PSD blocks, negative are diagonal blocks
  // merged (in order) into the single nonnegative block.
  struct BlockRef {
    bool diag;
    int index;   // PSD block index, or nonneg offset
    int size;
  };
  std::vector<BlockRef> blocks;
  {
    std::vector<long long> sizes;
    while (static_cast<int>(sizes.size()) < nblocks) {
      std::istringstream ls(next_data_line());
      long long v;
      while (ls >> v) sizes.push_back(v);
    }
    if (static_cast<int>(sizes.size()) != nblocks)
      throw std::invalid_argument("sdpa import: malformed block size line");
    int nn_at = 0;
    for (long long sz : sizes) {
      if (sz == 0) throw std::invalid_argument("sdpa import: zero block");
      if (sz > 0) {
        blocks.push_back({false, p.add_psd_block(static_cast<int>(sz)),
                          static_cast<int>(sz)});
      } else {
        blocks.push_back({true, nn_at, static_cast<int>(-sz)});
        nn_at += static_cast<int>(-sz);
      }
    }
    p.nonneg_size = nn_at;
  }

  p.rows.resize(m);
  {
    std::vector<double> rhs;
    while (static_cast<int>(rhs.size()) < m) {
      std::istringstream ls(next_data_line());
      double v;
      while (ls >> v) rhs.push_back(v);
    }
    if (static_cast<int>(rhs.size()) != m)
      throw std::invalid_argument("sdpa import: malformed rhs line");
    for (int r = 0; r < m; ++r) p.rows[r].rhs = rhs[r];
  }

  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '*' || line[0] == '"') continue;
    std::istringstream ls(clean_line(line));
    int matno, blk, i, j;
    double v;
    if (!(ls >> matno >> blk >> i >> j >> v)) {
      std::string probe;
      if (std::istringstream(line) >> probe && !probe.empty())
        throw std::invalid_argument("sdpa import: malformed entry line");
      continue;
    }
    if (matno < 0 || matno > m)
      throw std::invalid_argument("sdpa import: entry for unknown matrix");
    if (blk < 1 || blk > static_cast<int>(blocks.size()))
      throw std::invalid_argument("sdpa import: entry for unknown block");
    const BlockRef& ref = blocks[blk - 1];
    Term t;
    if (ref.diag) {
      if (i != j)
        throw std::invalid_argument(
            "sdpa import: off-diagonal entry in a diagonal block");
      if (i < 1 || i > ref.size)
        throw std::invalid_argument("sdpa import: diagonal index range");
      t = SdpProblem::nonneg_entry(ref.index + i - 1, v);
    } else {
      if (i < 1 || j < 1 || i > ref.size || j > ref.size)
        throw std::invalid_argument("sdpa import: PSD index range");
      t = SdpProblem::psd_entry(ref.index, i - 1, j - 1, v);
    }
    if (matno == 0)
      p.objective.push_back(t);
    else
      p.rows[matno - 1].terms.push_back(t);
  }

  return canonicalize(p);
}

}  // namespace pathcert
