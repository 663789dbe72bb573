#include "phonfeat/utf8.hpp"

#include <array>
#include <cstdio>

#include "phonfeat/error.hpp"

namespace phonfeat {

namespace {

char32_t decode_one(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t k) -> unsigned {
    return static_cast<unsigned char>(s[k]);
  };
  const unsigned b0 = byte(i);
  if (b0 < 0x80) {
    i += 1;
    return b0;
  }
  auto cont = [&](std::size_t k) {
    return k < s.size() && (byte(k) & 0xC0u) == 0x80u;
  };
  if ((b0 & 0xE0u) == 0xC0u) {
    if (!cont(i + 1)) throw Error("invalid UTF-8 sequence");
    char32_t cp = ((b0 & 0x1Fu) << 6) | (byte(i + 1) & 0x3Fu);
    i += 2;
    if (cp < 0x80) throw Error("overlong UTF-8 sequence");
    return cp;
  }
  if ((b0 & 0xF0u) == 0xE0u) {
    if (!cont(i + 1) || !cont(i + 2)) throw Error("invalid UTF-8 sequence");
    char32_t cp = ((b0 & 0x0Fu) << 12) | ((byte(i + 1) & 0x3Fu) << 6) |
                  (byte(i + 2) & 0x3Fu);
    i += 3;
    if (cp < 0x800) throw Error("overlong UTF-8 sequence");
    if (cp >= 0xD800 && cp <= 0xDFFF)
      throw Error("UTF-8 sequence encodes a surrogate");
    return cp;
  }
  if ((b0 & 0xF8u) == 0xF0u) {
    if (!cont(i + 1) || !cont(i + 2) || !cont(i + 3))
      throw Error("invalid UTF-8 sequence");
    char32_t cp = ((b0 & 0x07u) << 18) | ((byte(i + 1) & 0x3Fu) << 12) |
                  ((byte(i + 2) & 0x3Fu) << 6) | (byte(i + 3) & 0x3Fu);
    i += 4;
    if (cp < 0x10000 || cp > 0x10FFFF) throw Error("invalid UTF-8 codepoint");
    return cp;
  }
  throw Error("invalid UTF-8 lead byte");
}

}  // namespace

std::vector<char32_t> utf8_decode(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) out.push_back(decode_one(text, i));
  return out;
}

std::string utf8_encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::string utf8_encode(const std::vector<char32_t>& cps) {
  std::string out;
  for (char32_t cp : cps) out += utf8_encode(cp);
  return out;
}

std::size_t utf8_length(std::string_view text) {
  return utf8_decode(text).size();
}

std::string codepoint_name(char32_t cp) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "U+%04X", static_cast<unsigned>(cp));
  return buf;
}

std::string utf8_casefold(std::string_view text) {
  std::vector<char32_t> cps = utf8_decode(text);
  for (char32_t& cp : cps) {
    if (cp >= U'A' && cp <= U'Z') {
      cp += 0x20;
    } else if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) {
      // Latin-1 uppercase letters (À..Þ except ×).
      cp += 0x20;
    } else if (cp >= 0x100 && cp <= 0x177 && (cp % 2 == 0)) {
      // Latin Extended-A pairs upper/lower on even/odd codepoints here.
      cp += 1;
    } else if (cp == 0x178) {
      cp = 0xFF;  // Ÿ
    } else if (cp == 0x179 || cp == 0x17B || cp == 0x17D) {
      cp += 1;  // Ź Ż Ž
    }
  }
  return utf8_encode(cps);
}

}  // namespace phonfeat
