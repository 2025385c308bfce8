#pragma once

#include <string>
#include <string_view>

#include "padyn/qp.hpp"
#include "padyn/zp.hpp"

namespace padyn {

// Textual value encoding `p^v * [d0 d1 d2 ...]`, digits little-endian from
// the window start. Printing then parsing is the identity.
std::string to_text(const ZpApprox& x);
std::string to_text(const QpApprox& x);

QpApprox parse_qp(std::string_view text);
// Requires v = 0.
ZpApprox parse_zp(std::string_view text);

}  // namespace padyn
