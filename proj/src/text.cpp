#include "padyn/text.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

namespace padyn {

namespace {

std::string encode(std::uint32_t p, int v, std::span<const Digit> digits) {
  std::ostringstream os;
  os << p << '^' << v << " * [";
  for (std::size_t i = 0; i < digits.size(); ++i) os << (i ? " " : "") << digits[i];
  os << ']';
  return os.str();
}

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  long long integer() {
    skip_ws();
    long long value = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), value);
    if (ec != std::errc()) fail("expected integer");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return value;
  }
  void finish() {
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("bad value '" + std::string(s_) + "': " + why + " at offset " +
                     std::to_string(pos_));
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_text(const ZpApprox& x) { return encode(x.prime(), 0, x.digits()); }
std::string to_text(const QpApprox& x) { return encode(x.prime(), x.offset(), x.digits()); }

QpApprox parse_qp(std::string_view text) {
  Cursor c(text);
  long long p = c.integer();
  c.expect('^');
  long long v = c.integer();
  c.expect('*');
  c.expect('[');
  std::vector<Digit> digits;
  while (!c.peek(']')) {
    long long d = c.integer();
    if (d < 0 || d >= p) c.fail("digit out of range");
    digits.push_back(static_cast<Digit>(d));
  }
  c.expect(']');
  c.finish();
  if (p < 2 || p > Prime::kMax) c.fail("prime out of range");
  if (digits.empty()) c.fail("empty digit list");
  try {
    return QpApprox(Prime(static_cast<std::uint32_t>(p)), static_cast<int>(v), std::move(digits));
  } catch (const DomainError& e) {
    c.fail(e.what());
  }
}

ZpApprox parse_zp(std::string_view text) {
  QpApprox q = parse_qp(text);
  if (q.offset() != 0)
    throw ParseError("Z_p value must have exponent 0: '" + std::string(text) + "'");
  return ZpApprox(q.prime(), std::vector<Digit>(q.digits().begin(), q.digits().end()));
}

}  // namespace padyn
