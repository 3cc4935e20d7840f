#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace translit {

// Levenshtein distance (unit insert/delete/substitute). Two-row DP.
int edit_distance(std::u32string_view a, std::u32string_view b);
int edit_distance(std::span<const int32_t> a, std::span<const int32_t> b);

enum class EditOp : uint8_t { match, substitute, insert, erase };

// Minimal edit script turning `a` into `b`; ties prefer match/substitute,
// then erase, then insert. Used for error highlighting in reports.
std::vector<EditOp> edit_ops(std::u32string_view a, std::u32string_view b);

// Renders an edit script as e.g. "S@2 D@5 I@7" with 1-based positions in `a`
// (insertions anchor to the following position). Empty string when a == b.
std::string format_edit_ops(const std::vector<EditOp>& ops);

}  // namespace translit
