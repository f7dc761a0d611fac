#include "georl/text.hpp"

#include <algorithm>
#include <cstdint>

#include "georl/errors.hpp"

namespace georl {
namespace {

// Decodes one UTF-8 code point starting at s[i]; advances i. Malformed bytes
// are consumed one at a time and returned as U+FFFD so normalization stays
// total over arbitrary input.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t j) -> std::uint8_t { return static_cast<std::uint8_t>(s[j]); };
  std::uint8_t b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + len > s.size()) {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k < len; ++k) {
    if ((byte(i + k) & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (byte(i + k) & 0x3F);
  }
  i += len;
  return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
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
}

// Folds one code point to its lowercase base-letter form, the composed
// equivalent of canonical decomposition plus combining-mark removal for the
// Latin-1 Supplement and Latin Extended-A/B ranges that cover place names in
// Latin script. Returns nullptr when the code point has no fold.
const char* fold_latin(char32_t cp) {
  switch (cp) {
    case 0x00C0: case 0x00C1: case 0x00C2: case 0x00C3: case 0x00C4: case 0x00C5:
    case 0x00E0: case 0x00E1: case 0x00E2: case 0x00E3: case 0x00E4: case 0x00E5:
    case 0x0100: case 0x0101: case 0x0102: case 0x0103: case 0x0104: case 0x0105:
    case 0x01CD: case 0x01CE:
      return "a";
    case 0x00C6: case 0x00E6: return "ae";
    case 0x00C7: case 0x00E7: case 0x0106: case 0x0107: case 0x0108: case 0x0109:
    case 0x010A: case 0x010B: case 0x010C: case 0x010D:
      return "c";
    case 0x00D0: case 0x00F0: case 0x010E: case 0x010F: case 0x0110: case 0x0111:
      return "d";
    case 0x00C8: case 0x00C9: case 0x00CA: case 0x00CB:
    case 0x00E8: case 0x00E9: case 0x00EA: case 0x00EB:
    case 0x0112: case 0x0113: case 0x0114: case 0x0115: case 0x0116: case 0x0117:
    case 0x0118: case 0x0119: case 0x011A: case 0x011B:
      return "e";
    case 0x011C: case 0x011D: case 0x011E: case 0x011F: case 0x0120: case 0x0121:
    case 0x0122: case 0x0123:
      return "g";
    case 0x0124: case 0x0125: case 0x0126: case 0x0127: return "h";
    case 0x00CC: case 0x00CD: case 0x00CE: case 0x00CF:
    case 0x00EC: case 0x00ED: case 0x00EE: case 0x00EF:
    case 0x0128: case 0x0129: case 0x012A: case 0x012B: case 0x012C: case 0x012D:
    case 0x012E: case 0x012F: case 0x0130: case 0x0131:
    case 0x01CF: case 0x01D0:
      return "i";
    case 0x0132: case 0x0133: return "ij";
    case 0x0134: case 0x0135: return "j";
    case 0x0136: case 0x0137: case 0x0138: return "k";
    case 0x0139: case 0x013A: case 0x013B: case 0x013C: case 0x013D: case 0x013E:
    case 0x013F: case 0x0140: case 0x0141: case 0x0142:
      return "l";
    case 0x00D1: case 0x00F1: case 0x0143: case 0x0144: case 0x0145: case 0x0146:
    case 0x0147: case 0x0148: case 0x0149: case 0x014A: case 0x014B:
      return "n";
    case 0x00D2: case 0x00D3: case 0x00D4: case 0x00D5: case 0x00D6: case 0x00D8:
    case 0x00F2: case 0x00F3: case 0x00F4: case 0x00F5: case 0x00F6: case 0x00F8:
    case 0x014C: case 0x014D: case 0x014E: case 0x014F: case 0x0150: case 0x0151:
    case 0x01A0: case 0x01A1: case 0x01D1: case 0x01D2:
      return "o";
    case 0x0152: case 0x0153: return "oe";
    case 0x0154: case 0x0155: case 0x0156: case 0x0157: case 0x0158: case 0x0159:
      return "r";
    case 0x015A: case 0x015B: case 0x015C: case 0x015D: case 0x015E: case 0x015F:
    case 0x0160: case 0x0161: case 0x0218: case 0x0219: case 0x017F:
      return "s";
    case 0x00DE: case 0x00FE: return "th";
    case 0x00DF: return "ss";
    case 0x0162: case 0x0163: case 0x0164: case 0x0165: case 0x0166: case 0x0167:
    case 0x021A: case 0x021B:
      return "t";
    case 0x00D9: case 0x00DA: case 0x00DB: case 0x00DC:
    case 0x00F9: case 0x00FA: case 0x00FB: case 0x00FC:
    case 0x0168: case 0x0169: case 0x016A: case 0x016B: case 0x016C: case 0x016D:
    case 0x016E: case 0x016F: case 0x0170: case 0x0171: case 0x0172: case 0x0173:
    case 0x01AF: case 0x01B0: case 0x01D3: case 0x01D4:
      return "u";
    case 0x0174: case 0x0175: return "w";
    case 0x00DD: case 0x00FD: case 0x00FF: case 0x0176: case 0x0177: case 0x0178:
      return "y";
    case 0x0179: case 0x017A: case 0x017B: case 0x017C: case 0x017D: case 0x017E:
      return "z";
    default:
      return nullptr;
  }
}

bool is_space_cp(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' ||
         cp == U'\v' || cp == 0x00A0;
}

bool is_punct_cp(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '!' && cp <= '/') || (cp >= ':' && cp <= '@') ||
           (cp >= '[' && cp <= '`') || (cp >= '{' && cp <= '~');
  }
  switch (cp) {
    case 0x2013:  // en dash
    case 0x2014:  // em dash
    case 0x2018: case 0x2019:  // single quotes
    case 0x201C: case 0x201D:  // double quotes
    case 0x00AB: case 0x00BB:  // guillemets
    case 0x00B7:  // middle dot
    case 0x2026:  // ellipsis
      return true;
    default:
      return false;
  }
}

bool is_combining_mark(char32_t cp) { return cp >= 0x0300 && cp <= 0x036F; }

}  // namespace

std::string normalize_place(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  bool started = false;
  std::size_t i = 0;
  while (i < raw.size()) {
    char32_t cp = decode_utf8(raw, i);
    if (is_space_cp(cp)) {
      pending_space = started;
      continue;
    }
    if (is_punct_cp(cp) || is_combining_mark(cp) || cp == 0xFFFD) continue;
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    started = true;
    if (const char* folded = fold_latin(cp)) {
      out += folded;
    } else if (cp < 0x80) {
      out.push_back(static_cast<char>(cp >= 'A' && cp <= 'Z' ? cp + 32 : cp));
    } else {
      encode_utf8(cp, out);
    }
  }
  if (out.empty()) throw EmptyAfterNormalization(std::string(raw));
  return out;
}

std::vector<std::string> tokenize(std::string_view normalized) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < normalized.size()) {
    std::size_t space = normalized.find(' ', pos);
    if (space == std::string_view::npos) space = normalized.size();
    if (space > pos) tokens.emplace_back(normalized.substr(pos, space - pos));
    pos = space + 1;
  }
  return tokens;
}

double token_jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& t : a) inter += b.count(t);
  std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace georl
