#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

// Surface-form conventions shared by the synthetic generator (which emits
// variants) and the stub embedding provider (which folds them back).
namespace skillgraph::surface {

std::span<const std::string_view> vendor_prefixes();

// Short form of a full word, when the menu has one ("management" -> "mgmt").
std::optional<std::string_view> abbreviate_word(std::string_view word);
// Inverse of abbreviate_word.
std::optional<std::string_view> expand_word(std::string_view word);

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
std::string to_title(std::string_view s);
std::string abbreviate(std::string_view s);

// Lowercase, punctuation folded to spaces, vendor tokens dropped,
// abbreviations expanded, single-space joined.
std::string canonical_key(std::string_view s);

}  // namespace skillgraph::surface
