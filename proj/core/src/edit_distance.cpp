#include "translit/edit_distance.hpp"

#include <algorithm>

namespace translit {

namespace {

template <class Seq>
int levenshtein(const Seq& a, const Seq& b) {
  const size_t n = a.size(), m = b.size();
  if (n == 0) return static_cast<int>(m);
  if (m == 0) return static_cast<int>(n);
  std::vector<int> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= m; ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace

int edit_distance(std::u32string_view a, std::u32string_view b) {
  return levenshtein(a, b);
}

int edit_distance(std::span<const int32_t> a, std::span<const int32_t> b) {
  return levenshtein(a, b);
}

std::vector<EditOp> edit_ops(std::u32string_view a, std::u32string_view b) {
  const size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1));
  for (size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
  for (size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      int sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      d[i][j] = std::min({sub, d[i - 1][j] + 1, d[i][j - 1] + 1});
    }
  }
  std::vector<EditOp> ops;
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)) {
      ops.push_back(a[i - 1] == b[j - 1] ? EditOp::match : EditOp::substitute);
      --i;
      --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ops.push_back(EditOp::erase);
      --i;
    } else {
      ops.push_back(EditOp::insert);
      --j;
    }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

std::string format_edit_ops(const std::vector<EditOp>& ops) {
  std::string out;
  size_t pos = 0;  // position in `a`, 1-based for the next consumed symbol
  for (EditOp op : ops) {
    char tag = 0;
    switch (op) {
      case EditOp::match:
        ++pos;
        continue;
      case EditOp::substitute:
        tag = 'S';
        ++pos;
        break;
      case EditOp::erase:
        tag = 'D';
        ++pos;
        break;
      case EditOp::insert:
        tag = 'I';
        break;
    }
    if (!out.empty()) out += ' ';
    out += tag;
    out += '@';
    out += std::to_string(op == EditOp::insert ? pos + 1 : pos);
  }
  return out;
}

}  // namespace translit
