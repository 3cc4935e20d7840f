#pragma once

#include <string>
#include <string_view>

namespace translit {

// Decodes UTF-8 into one char32_t per code point. Throws Error on malformed
// sequences, naming the byte offset. All text I/O in this project goes
// through these two functions; no other transcoding exists.
std::u32string utf8_decode(std::string_view bytes);

std::string utf8_encode(std::u32string_view text);
std::string utf8_encode(char32_t cp);

}  // namespace translit
