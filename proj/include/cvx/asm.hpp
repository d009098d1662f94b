#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "cvx/isa.hpp"

namespace cvx {

// Control-register block at the top of data memory (word addresses).
inline constexpr uint32_t kCtrlBase = 0xFF80;
inline constexpr uint32_t kCtrlFracShift = kCtrlBase + 0;
inline constexpr uint32_t kCtrlRounding = kCtrlBase + 1;
inline constexpr uint32_t kCtrlGateBits = kCtrlBase + 2;
inline constexpr uint32_t kCtrlLbStride = kCtrlBase + 3;
inline constexpr uint32_t kCtrlStatus = kCtrlBase + 4;
inline constexpr uint32_t kCtrlPatternBase = kCtrlBase + 8;    // 4 tables x 16 words
inline constexpr uint32_t kCtrlDmaBase = kCtrlBase + 72;       // 4 descriptors x 8 words
inline constexpr uint32_t kCtrlWords = 128;

struct AsmError : std::runtime_error {
    int line;
    int col;
    AsmError(int line_, int col_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ", col " +
                             std::to_string(col_) + ": " + msg),
          line(line_), col(col_) {}
};

struct Assembled {
    Program program;
    std::map<std::string, int> symbols;  // label -> bundle index
};

// Two-pass assembler. Bundle syntax: up to 4 instructions separated by
// "||", one bundle per line; labels "name:"; directives .org, .word,
// .pattern. Comments start with ';' or '#'. Throws AsmError.
Assembled assemble(const std::string& source);

// Canonical text whose reassembly is bit-identical to the input program.
std::string disassemble(const Program& p);

std::string symbol_map_text(const Assembled& a);

}  // namespace cvx
