#include "catforge/ctl/lexer.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <unordered_map>

namespace catforge::ctl {

namespace {

constexpr std::size_t kMaxSource = 64 * 1024;

const std::unordered_map<std::string_view, TokKind>& keywords() {
  static const std::unordered_map<std::string_view, TokKind> table = {
      {"if", TokKind::KwIf},       {"else", TokKind::KwElse},
      {"for", TokKind::KwFor},     {"in", TokKind::KwIn},
      {"return", TokKind::KwReturn}, {"and", TokKind::KwAnd},
      {"or", TokKind::KwOr},       {"not", TokKind::KwNot},
      {"true", TokKind::KwTrue},   {"false", TokKind::KwFalse},
      {"null", TokKind::KwNull},
  };
  return table;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void append_utf8(std::string& out, unsigned cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    if (src_.size() > kMaxSource) {
      throw SyntaxError({1, 1}, "program exceeds 64 KiB");
    }
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      SourcePos pos{line_, col_};
      if (at_end()) {
        out.push_back({TokKind::End, pos, "", 0, 0.0, ""});
        return out;
      }
      char c = peek();
      if (ident_start(c)) {
        out.push_back(lex_ident(pos));
      } else if (digit(c)) {
        out.push_back(lex_number(pos));
      } else if (c == '"') {
        out.push_back(lex_string(pos));
      } else {
        out.push_back(lex_punct(pos));
      }
    }
  }

 private:
  bool at_end() const { return i_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0';
  }
  char advance() {
    char c = src_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_trivia() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token lex_ident(SourcePos pos) {
    std::string name;
    while (!at_end() && ident_char(peek())) name += advance();
    auto it = keywords().find(name);
    if (it != keywords().end()) return {it->second, pos, name, 0, 0.0, ""};
    return {TokKind::Ident, pos, name, 0, 0.0, ""};
  }

  Token lex_number(SourcePos pos) {
    std::string text;
    bool is_float = false;
    while (digit(peek())) text += advance();
    if (peek() == '.' && digit(peek(1))) {
      is_float = true;
      text += advance();
      while (digit(peek())) text += advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      char next = peek(1);
      if (digit(next) || ((next == '+' || next == '-') && digit(peek(2)))) {
        is_float = true;
        text += advance();
        if (peek() == '+' || peek() == '-') text += advance();
        while (digit(peek())) text += advance();
      }
    }
    if (is_float) {
      errno = 0;
      double v = std::strtod(text.c_str(), nullptr);
      if (errno == ERANGE || !std::isfinite(v)) {
        throw SyntaxError(pos, "number out of range: " + text);
      }
      return {TokKind::Float, pos, text, 0, v, ""};
    }
    // Magnitude may be INT64_MAX + 1; only valid directly under unary minus.
    std::uint64_t mag = 0;
    constexpr std::uint64_t kLimit = 9223372036854775808ULL;
    for (char d : text) {
      std::uint64_t digit_val = static_cast<std::uint64_t>(d - '0');
      if (mag > (kLimit - digit_val) / 10) {
        throw SyntaxError(pos, "integer literal out of range: " + text);
      }
      mag = mag * 10 + digit_val;
    }
    return {TokKind::Int, pos, text, mag, 0.0, ""};
  }

  Token lex_string(SourcePos pos) {
    advance();  // opening quote
    std::string value;
    for (;;) {
      if (at_end()) throw SyntaxError(pos, "unterminated string");
      char c = advance();
      if (c == '"') break;
      if (c == '\n') throw SyntaxError(pos, "unterminated string");
      if (static_cast<unsigned char>(c) < 0x20) {
        throw SyntaxError(pos, "control character in string literal");
      }
      if (c != '\\') {
        value += c;
        continue;
      }
      if (at_end()) throw SyntaxError(pos, "unterminated string");
      char esc = advance();
      switch (esc) {
        case '"': value += '"'; break;
        case '\\': value += '\\'; break;
        case '/': value += '/'; break;
        case 'n': value += '\n'; break;
        case 't': value += '\t'; break;
        case 'r': value += '\r'; break;
        case 'u': {
          unsigned cp = 0;
          for (int k = 0; k < 4; ++k) {
            if (at_end()) throw SyntaxError(pos, "unterminated string");
            int h = hex_digit(advance());
            if (h < 0) throw SyntaxError(pos, "bad \\u escape in string");
            cp = cp * 16 + static_cast<unsigned>(h);
          }
          append_utf8(value, cp);
          break;
        }
        default:
          throw SyntaxError(pos, std::string("unknown escape \\") + esc);
      }
    }
    if (value.size() > 65536) throw SyntaxError(pos, "string literal too long");
    return {TokKind::Str, pos, "", 0, 0.0, value};
  }

  Token lex_punct(SourcePos pos) {
    char c = advance();
    auto two = [&](TokKind k) {
      advance();
      return Token{k, pos, "", 0, 0.0, ""};
    };
    switch (c) {
      case '=': return peek() == '=' ? two(TokKind::Eq) : Token{TokKind::Assign, pos, "", 0, 0.0, ""};
      case '!':
        if (peek() == '=') return two(TokKind::Ne);
        throw SyntaxError(pos, "unexpected character '!'");
      case '<': return peek() == '=' ? two(TokKind::Le) : Token{TokKind::Lt, pos, "", 0, 0.0, ""};
      case '>': return peek() == '=' ? two(TokKind::Ge) : Token{TokKind::Gt, pos, "", 0, 0.0, ""};
      case '+': return {TokKind::Plus, pos, "", 0, 0.0, ""};
      case '-': return {TokKind::Minus, pos, "", 0, 0.0, ""};
      case '*': return {TokKind::Star, pos, "", 0, 0.0, ""};
      case '/': return {TokKind::Slash, pos, "", 0, 0.0, ""};
      case '(': return {TokKind::LParen, pos, "", 0, 0.0, ""};
      case ')': return {TokKind::RParen, pos, "", 0, 0.0, ""};
      case '[': return {TokKind::LBracket, pos, "", 0, 0.0, ""};
      case ']': return {TokKind::RBracket, pos, "", 0, 0.0, ""};
      case '{': return {TokKind::LBrace, pos, "", 0, 0.0, ""};
      case '}': return {TokKind::RBrace, pos, "", 0, 0.0, ""};
      case ',': return {TokKind::Comma, pos, "", 0, 0.0, ""};
      case '.': return {TokKind::Dot, pos, "", 0, 0.0, ""};
      case ':': return {TokKind::Colon, pos, "", 0, 0.0, ""};
      default: {
        unsigned char u = static_cast<unsigned char>(c);
        char buf[8];
        std::snprintf(buf, sizeof(buf), "0x%02X", u);
        throw SyntaxError(pos, std::string("unexpected byte ") + buf);
      }
    }
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> lex(std::string_view source) { return Lexer(source).run(); }

}  // namespace catforge::ctl
