#include "cvx/asm.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <vector>

namespace cvx {

namespace {

struct Token {
    std::string text;
    int col;  // 1-based
};

std::vector<Token> tokenize(const std::string& text, int line, int col_base) {
    // Splits an instruction into words, punctuation and bracketed groups:
    // identifiers/numbers, and single chars , [ ] + - # .
    std::vector<Token> out;
    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) { i++; continue; }
        int col = col_base + static_cast<int>(i);
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' ) {
            size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
                    text[j] == '.'))
                j++;
            out.push_back({text.substr(i, j - i), col});
            i = j;
        } else if (c == ',' || c == '[' || c == ']' || c == '+' || c == '-' || c == '#') {
            out.push_back({std::string(1, c), col});
            i++;
        } else if (c == '.') {
            size_t j = i + 1;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                j++;
            out.push_back({text.substr(i, j - i), col});
            i = j;
        } else {
            throw AsmError(line, col, std::string("unexpected character '") + c + "'");
        }
    }
    return out;
}

struct Cursor {
    const std::vector<Token>& toks;
    size_t pos = 0;
    int line;

    bool done() const { return pos >= toks.size(); }
    const Token& peek() const {
        static Token end{"", 0};
        return done() ? end : toks[pos];
    }
    Token next() {
        if (done()) throw AsmError(line, last_col(), "unexpected end of instruction");
        return toks[pos++];
    }
    int last_col() const { return toks.empty() ? 1 : toks.back().col + 1; }
    void expect(const std::string& t) {
        Token tok = next();
        if (tok.text != t)
            throw AsmError(line, tok.col, "expected '" + t + "', got '" + tok.text + "'");
    }
    bool accept(const std::string& t) {
        if (!done() && toks[pos].text == t) { pos++; return true; }
        return false;
    }
};

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return s;
}

int64_t parse_int(const Token& t, int line) {
    const std::string& s = t.text;
    try {
        size_t used = 0;
        int64_t v;
        if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X'))
            v = static_cast<int64_t>(std::stoull(s.substr(2), &used, 16)), used += 2;
        else
            v = std::stoll(s, &used, 10);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (...) {
        throw AsmError(line, t.col, "bad number '" + s + "'");
    }
}

int64_t parse_signed_int(Cursor& c) {
    bool neg = c.accept("-");
    Token t = c.next();
    int64_t v = parse_int(t, c.line);
    return neg ? -v : v;
}

// Register token parsing. Returns index or throws.
int parse_reg_prefixed(const Token& t, const char* prefix, int count, int line) {
    std::string u = upper(t.text);
    std::string p = prefix;
    if (u.size() <= p.size() || u.compare(0, p.size(), p) != 0)
        throw AsmError(line, t.col, std::string("expected ") + prefix + " register, got '" +
                                        t.text + "'");
    int idx = 0;
    for (size_t i = p.size(); i < u.size(); i++) {
        if (!std::isdigit(static_cast<unsigned char>(u[i])))
            throw AsmError(line, t.col, "bad register '" + t.text + "'");
        idx = idx * 10 + (u[i] - '0');
        if (idx > 1000) break;
    }
    if (idx >= count)
        throw AsmError(line, t.col, "register index out of range in '" + t.text + "'");
    return idx;
}

bool looks_like(const std::string& text, const char* prefix) {
    std::string u = upper(text);
    std::string p = prefix;
    if (u.size() <= p.size() || u.compare(0, p.size(), p) != 0) return false;
    return std::isdigit(static_cast<unsigned char>(u[p.size()]));
}

int parse_r(Cursor& c) { return parse_reg_prefixed(c.next(), "R", kNumR, c.line); }
int parse_vr(Cursor& c) { return parse_reg_prefixed(c.next(), "VR", kNumVR, c.line); }
int parse_vrl(Cursor& c) { return parse_reg_prefixed(c.next(), "VRL", kNumVRl, c.line); }

void check_imm_range(int64_t v, int64_t lo, int64_t hi, int line, int col) {
    if (v < lo || v > hi)
        throw AsmError(line, col, "immediate " + std::to_string(v) + " out of range [" +
                                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

// [Ra], [Ra + imm], [Ra - imm]
void parse_mem(Cursor& c, uint8_t& ra, int32_t& imm, int64_t lo, int64_t hi) {
    c.expect("[");
    int col = c.peek().col;
    ra = static_cast<uint8_t>(parse_r(c));
    imm = 0;
    if (c.accept("+")) {
        imm = static_cast<int32_t>(parse_signed_int(c));
    } else if (c.accept("-")) {
        imm = -static_cast<int32_t>(parse_signed_int(c));
    }
    check_imm_range(imm, lo, hi, c.line, col);
    c.expect("]");
}

// LB<seg>[Rc + imm]
void parse_lb_addr(Cursor& c, uint8_t& seg, uint8_t& creg, int32_t& imm, int64_t imm_hi) {
    Token t = c.next();
    seg = static_cast<uint8_t>(parse_reg_prefixed(t, "LB", kLbSegments, c.line));
    c.expect("[");
    creg = static_cast<uint8_t>(parse_r(c));
    imm = 0;
    int col = c.peek().col;
    if (c.accept("+")) imm = static_cast<int32_t>(parse_signed_int(c));
    check_imm_range(imm, 0, imm_hi, c.line, col);
    c.expect("]");
}

// Vector operand with optional mode suffix: VR4, VR2.bcast, VR4.perm1,
// VR4.splat7, VR4.win
VecOperand parse_vec_operand(Cursor& c) {
    Token t = c.next();
    std::string text = t.text;
    std::string suffix;
    size_t dot = text.find('.');
    if (dot != std::string::npos) {
        suffix = text.substr(dot + 1);
        text = text.substr(0, dot);
    }
    Token base{text, t.col};
    VecOperand o;
    o.vr = static_cast<uint8_t>(parse_reg_prefixed(base, "VR", kNumVR, c.line));
    if (suffix.empty() || suffix == "win") {
        o.mode = VecMode::window;
    } else if (suffix == "bcast") {
        o.mode = VecMode::broadcast;
    } else if (suffix.rfind("perm", 0) == 0) {
        o.mode = VecMode::permute;
        int id = std::atoi(suffix.c_str() + 4);
        if (id < 0 || id >= kNumRuntimePatterns)
            throw AsmError(c.line, t.col, "pattern table id out of range");
        o.pattern = static_cast<uint8_t>(id);
    } else if (suffix.rfind("splat", 0) == 0) {
        o.mode = VecMode::permute;
        int lane = std::atoi(suffix.c_str() + 5);
        if (lane < 0 || lane >= kLanes)
            throw AsmError(c.line, t.col, "splat lane out of range");
        o.pattern = static_cast<uint8_t>(kNumRuntimePatterns + lane);
    } else {
        throw AsmError(c.line, t.col, "unknown operand mode '." + suffix + "'");
    }
    return o;
}

struct PendingBranch {
    int bundle;
    int slot;
    std::string label;
    int line, col;
};

struct LineParse {
    std::vector<std::pair<int, Instruction>> slot_instrs;  // (slot, instruction)
    std::vector<PendingBranch> branches;
};

int vector_slot_for(const Instruction& in, int line, int col) {
    switch (in.op) {
        case Opcode::vmac: case Opcode::vmull:
        case Opcode::vmac_lb: case Opcode::vmull_lb:
        case Opcode::vclr: case Opcode::vaddl: case Opcode::vsubl:
            return in.vrl_d / 4 + 1;
        case Opcode::vcvt:
            return in.vrl_a / 4 + 1;
        case Opcode::vact: case Opcode::vmaxp:
            return 1;
        default:
            throw AsmError(line, col, "internal: not a vector opcode");
    }
}

// Parses one instruction's tokens into (slot, Instruction).
void parse_instr(Cursor& c, LineParse& lp, int bundle_index) {
    Token mnem = c.next();
    std::string m = upper(mnem.text);
    Instruction in;
    int slot = 0;

    auto add = [&](int s) {
        for (auto& [es, ei] : lp.slot_instrs)
            if (es == s)
                throw AsmError(c.line, mnem.col,
                               "slot conflict: two instructions for slot " + std::to_string(s));
        lp.slot_instrs.push_back({s, in});
    };

    if (m == "NOP") {
        in.op = Opcode::nop;
        // a bare NOP claims slot 0; vector NOPs are implicit
        add(0);
        return;
    } else if (m == "HALT") {
        in.op = Opcode::halt;
        add(0);
        return;
    } else if (m == "LD16" || m == "ST16") {
        in.op = (m == "LD16") ? Opcode::ld16 : Opcode::st16;
        in.rd = static_cast<uint8_t>(parse_r(c));
        c.expect(",");
        parse_mem(c, in.ra, in.imm, -32768, 32767);
        add(0);
        return;
    } else if (m == "LDV") {
        in.op = Opcode::ldv;
        in.vr_d = static_cast<uint8_t>(parse_vr(c));
        c.expect(",");
        if (looks_like(c.peek().text, "LB")) {
            in.mem_lb = true;
            uint8_t seg;
            parse_lb_addr(c, seg, in.ra, in.imm, (1 << 14) - 1);
            in.sub = seg;
        } else {
            parse_mem(c, in.ra, in.imm, -32768, 32767);
        }
        add(0);
        return;
    } else if (m == "STV") {
        in.op = Opcode::stv;
        in.vr_d = static_cast<uint8_t>(parse_vr(c));
        c.expect(",");
        parse_mem(c, in.ra, in.imm, -32768, 32767);
        add(0);
        return;
    } else if (m == "LDVL" || m == "STVL") {
        in.op = (m == "LDVL") ? Opcode::ldvl : Opcode::stvl;
        in.vrl_d = static_cast<uint8_t>(parse_vrl(c));
        c.expect(",");
        parse_mem(c, in.ra, in.imm, -32768, 32767);
        add(0);
        return;
    } else if (m == "MOVV") {
        in.op = Opcode::movv;
        const Token& d = c.peek();
        if (looks_like(d.text, "VRL")) {
            in.vrl_d = static_cast<uint8_t>(parse_vrl(c));
            c.expect(",");
            in.sub = static_cast<uint8_t>(MovForm::vrl_vrl);
            in.vrl_a = static_cast<uint8_t>(parse_vrl(c));
        } else if (looks_like(d.text, "VR")) {
            in.vr_d = static_cast<uint8_t>(parse_vr(c));
            c.expect(",");
            if (looks_like(c.peek().text, "VR")) {
                in.sub = static_cast<uint8_t>(MovForm::vr_vr);
                in.vr_s = static_cast<uint8_t>(parse_vr(c));
            } else {
                in.sub = static_cast<uint8_t>(MovForm::vr_splat);
                in.ra = static_cast<uint8_t>(parse_r(c));
            }
        } else {
            in.rd = static_cast<uint8_t>(parse_r(c));
            c.expect(",");
            if (c.accept("#")) {
                in.sub = static_cast<uint8_t>(MovForm::r_imm);
                int col = c.peek().col;
                int64_t v = parse_signed_int(c);
                check_imm_range(v, -32768, 65535, c.line, col);
                in.imm = static_cast<int32_t>(static_cast<int16_t>(v));
            } else if (looks_like(c.peek().text, "VR")) {
                in.sub = static_cast<uint8_t>(MovForm::r_lane);
                in.vr_s = static_cast<uint8_t>(parse_vr(c));
                c.expect("[");
                Token lt = c.next();
                int64_t lane = parse_int(lt, c.line);
                check_imm_range(lane, 0, 15, c.line, lt.col);
                in.lane = static_cast<uint8_t>(lane);
                c.expect("]");
            } else {
                in.sub = static_cast<uint8_t>(MovForm::r_r);
                in.ra = static_cast<uint8_t>(parse_r(c));
            }
        }
        add(0);
        return;
    } else if (m == "ADD" || m == "SUB" || m == "MUL" || m == "SHL" || m == "SHR" ||
               m == "AND" || m == "OR" || m == "XOR" || m == "ADDA32") {
        in.op = m == "ADD" ? Opcode::add : m == "SUB" ? Opcode::sub : m == "MUL" ? Opcode::mul
                : m == "SHL" ? Opcode::shl : m == "SHR" ? Opcode::shr
                : m == "AND" ? Opcode::and_ : m == "OR" ? Opcode::or_
                : m == "XOR" ? Opcode::xor_ : Opcode::adda32;
        in.rd = static_cast<uint8_t>(parse_r(c));
        c.expect(",");
        in.ra = static_cast<uint8_t>(parse_r(c));
        c.expect(",");
        if (c.accept("#")) {
            in.use_imm = true;
            int col = c.peek().col;
            int64_t v = parse_signed_int(c);
            check_imm_range(v, -(1 << 14), (1 << 14) - 1, c.line, col);
            in.imm = static_cast<int32_t>(v);
        } else {
            in.rb = static_cast<uint8_t>(parse_r(c));
        }
        add(0);
        return;
    } else if (m == "CMP") {
        in.op = Opcode::cmp;
        in.ra = static_cast<uint8_t>(parse_r(c));
        c.expect(",");
        if (c.accept("#")) {
            in.use_imm = true;
            int col = c.peek().col;
            int64_t v = parse_signed_int(c);
            check_imm_range(v, -32768, 32767, c.line, col);
            in.imm = static_cast<int32_t>(v);
        } else {
            in.rb = static_cast<uint8_t>(parse_r(c));
        }
        add(0);
        return;
    } else if (m == "BR" || m == "BRC") {
        in.op = (m == "BR") ? Opcode::br : Opcode::brc;
        if (m == "BRC") {
            Token ct = c.next();
            std::string cond = upper(ct.text);
            static const char* names[6] = {"EQ", "NE", "LT", "GE", "LE", "GT"};
            int ci = -1;
            for (int i = 0; i < 6; i++)
                if (cond == names[i]) ci = i;
            if (ci < 0) throw AsmError(c.line, ct.col, "unknown condition '" + ct.text + "'");
            in.sub = static_cast<uint8_t>(ci);
            c.expect(",");
        }
        Token t = c.next();
        if (std::isdigit(static_cast<unsigned char>(t.text[0]))) {
            int64_t v = parse_int(t, c.line);
            check_imm_range(v, 0, kPmBundles - 1, c.line, t.col);
            in.imm = static_cast<int32_t>(v);
        } else {
            in.imm = 0;
            lp.branches.push_back({bundle_index, static_cast<int>(lp.slot_instrs.size()),
                                   t.text, c.line, t.col});
        }
        add(0);
        return;
    } else if (m == "DMA.SUBMIT" || m == "DMA.WAIT") {
        in.op = (m == "DMA.SUBMIT") ? Opcode::dma_submit : Opcode::dma_wait;
        Token t = c.next();
        int64_t v = parse_int(t, c.line);
        check_imm_range(v, 0, 3, c.line, t.col);
        in.sub = static_cast<uint8_t>(v);
        add(0);
        return;
    } else if (m == "LB.LOADROW") {
        in.op = Opcode::lb_loadrow;
        Token t = c.next();
        int64_t v = parse_int(t, c.line);
        check_imm_range(v, 0, kLbSegments - 1, c.line, t.col);
        in.sub = static_cast<uint8_t>(v);
        c.expect(",");
        in.ra = static_cast<uint8_t>(parse_r(c));
        c.expect(",");
        in.rb = static_cast<uint8_t>(parse_r(c));
        add(0);
        return;
    } else if (m == "LB.SETSTRIDE") {
        in.op = Opcode::lb_setstride;
        Token t = c.next();
        int64_t v = parse_int(t, c.line);
        check_imm_range(v, 0, 15, c.line, t.col);
        in.imm = static_cast<int32_t>(v);
        add(0);
        return;
    } else if (m == "VMAC" || m == "VMULL") {
        bool mac = (m == "VMAC");
        in.vrl_d = static_cast<uint8_t>(parse_vrl(c));
        c.expect(",");
        if (looks_like(c.peek().text, "LB")) {
            in.op = mac ? Opcode::vmac_lb : Opcode::vmull_lb;
            int32_t imm;
            parse_lb_addr(c, in.lb.seg, in.lb.col_reg, imm, kLbSegmentElems - 1);
            in.lb.col_imm = static_cast<uint16_t>(imm);
        } else {
            in.op = mac ? Opcode::vmac : Opcode::vmull;
            in.a = parse_vec_operand(c);
        }
        c.expect(",");
        in.b = parse_vec_operand(c);
        slot = vector_slot_for(in, c.line, mnem.col);
        add(slot);
        return;
    } else if (m == "VADDL" || m == "VSUBL") {
        in.op = (m == "VADDL") ? Opcode::vaddl : Opcode::vsubl;
        in.vrl_d = static_cast<uint8_t>(parse_vrl(c));
        c.expect(",");
        in.vrl_a = static_cast<uint8_t>(parse_vrl(c));
        c.expect(",");
        in.vrl_b = static_cast<uint8_t>(parse_vrl(c));
        add(vector_slot_for(in, c.line, mnem.col));
        return;
    } else if (m == "VCLR") {
        in.op = Opcode::vclr;
        in.vrl_d = static_cast<uint8_t>(parse_vrl(c));
        add(vector_slot_for(in, c.line, mnem.col));
        return;
    } else if (m == "VCVT") {
        in.op = Opcode::vcvt;
        in.vr_d = static_cast<uint8_t>(parse_vr(c));
        c.expect(",");
        in.vrl_a = static_cast<uint8_t>(parse_vrl(c));
        add(vector_slot_for(in, c.line, mnem.col));
        return;
    } else if (m == "VACT" || m == "VMAXP") {
        in.op = (m == "VACT") ? Opcode::vact : Opcode::vmaxp;
        in.vr_d = static_cast<uint8_t>(parse_vr(c));
        c.expect(",");
        VecOperand o = parse_vec_operand(c);
        if (o.mode == VecMode::broadcast)
            throw AsmError(c.line, mnem.col, "broadcast not available on SFU operands");
        in.vr_s = o.vr;
        in.a.mode = (o.mode == VecMode::permute) ? VecMode::permute : VecMode::window;
        in.a.pattern = o.pattern;
        add(1);
        return;
    }
    throw AsmError(c.line, mnem.col, "unknown mnemonic '" + mnem.text + "'");
}

std::string strip_comment(const std::string& line) {
    size_t p = line.find_first_of(";#");
    // '#' also introduces immediates; only treat it as a comment when it is
    // the first non-space character or preceded by whitespace+nothing useful.
    // Simpler rule: ';' always comments; '#' comments only at line start.
    size_t semi = line.find(';');
    std::string s = (semi == std::string::npos) ? line : line.substr(0, semi);
    size_t first = s.find_first_not_of(" \t");
    if (first != std::string::npos && s[first] == '#') return "";
    (void)p;
    return s;
}

}  // namespace

Assembled assemble(const std::string& source) {
    std::vector<std::string> lines;
    {
        std::istringstream is(source);
        std::string l;
        while (std::getline(is, l)) lines.push_back(l);
    }

    struct WorkLine {
        int lineno;
        int loc;           // bundle index
        std::string text;  // instruction text (no label)
        int col_base;      // 1-based col of text start
        bool is_word = false;
        bool is_pattern = false;
    };

    std::map<std::string, int> symbols;
    std::vector<WorkLine> work;
    int loc = 0;

    auto pattern_bundles = 1 + 2 * kLanes;  // MOVV base + 16 x (MOVV, ST16)

    // pass 1: labels and location counting
    for (size_t li = 0; li < lines.size(); li++) {
        std::string raw = strip_comment(lines[li]);
        int lineno = static_cast<int>(li) + 1;
        size_t start = 0;
        // labels (possibly several) at line start
        while (true) {
            size_t first = raw.find_first_not_of(" \t", start);
            if (first == std::string::npos) { start = raw.size(); break; }
            size_t colon = raw.find(':', first);
            if (colon == std::string::npos) { start = first; break; }
            std::string cand = raw.substr(first, colon - first);
            bool ident = !cand.empty() &&
                         (std::isalpha(static_cast<unsigned char>(cand[0])) || cand[0] == '_');
            for (char ch : cand)
                ident = ident && (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_');
            if (!ident) { start = first; break; }
            if (symbols.count(cand))
                throw AsmError(lineno, static_cast<int>(first) + 1,
                               "duplicate label '" + cand + "'");
            symbols[cand] = loc;
            start = colon + 1;
        }
        std::string text = raw.substr(std::min(start, raw.size()));
        size_t first = text.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        int col_base = static_cast<int>(start + first) + 1;
        text = text.substr(first);

        if (text.rfind(".org", 0) == 0) {
            auto toks = tokenize(text.substr(4), lineno, col_base + 4);
            Cursor c{toks, 0, lineno};
            int64_t target = parse_signed_int(c);
            if (target < loc)
                throw AsmError(lineno, col_base, ".org target before current location");
            if (target > kPmBundles)
                throw AsmError(lineno, col_base, ".org target beyond program memory");
            loc = static_cast<int>(target);
            continue;
        }
        WorkLine w{lineno, loc, text, col_base, false, false};
        if (text.rfind(".word", 0) == 0) {
            w.is_word = true;
            loc += 1;
        } else if (text.rfind(".pattern", 0) == 0) {
            w.is_pattern = true;
            loc += pattern_bundles;
        } else {
            loc += 1;
        }
        work.push_back(w);
        if (loc > kPmBundles)
            throw AsmError(lineno, 1, "program exceeds " + std::to_string(kPmBundles) +
                                          " bundles (program memory overflow)");
    }

    // pass 2: emit
    Assembled out;
    out.symbols = symbols;
    out.program.bundles.assign(static_cast<size_t>(loc), Bundle{});
    std::vector<PendingBranch> branches;

    for (const WorkLine& w : work) {
        if (w.is_word) {
            auto toks = tokenize(w.text.substr(5), w.lineno, w.col_base + 5);
            Cursor c{toks, 0, w.lineno};
            std::array<uint32_t, 4> words{};
            for (int i = 0; i < 4; i++) {
                if (i > 0) c.accept(",");
                int64_t v = parse_signed_int(c);
                words[i] = static_cast<uint32_t>(v);
            }
            try {
                out.program.bundles[static_cast<size_t>(w.loc)] = decode_bundle(words);
            } catch (const DecodeError& e) {
                throw AsmError(w.lineno, w.col_base, std::string(".word: ") + e.what());
            }
            continue;
        }
        if (w.is_pattern) {
            auto toks = tokenize(w.text.substr(8), w.lineno, w.col_base + 8);
            Cursor c{toks, 0, w.lineno};
            int64_t id = parse_signed_int(c);
            if (id < 0 || id >= kNumRuntimePatterns)
                throw AsmError(w.lineno, w.col_base, "pattern table id out of range");
            int base = w.loc;
            Instruction mv;
            mv.op = Opcode::movv;
            mv.sub = static_cast<uint8_t>(MovForm::r_imm);
            mv.rd = 30;
            mv.imm = static_cast<int32_t>(
                static_cast<int16_t>(kCtrlPatternBase + static_cast<uint32_t>(id) * kLanes));
            out.program.bundles[static_cast<size_t>(base)].slots[0] = mv;
            for (int k = 0; k < kLanes; k++) {
                c.accept(",");
                Token t = c.next();
                int64_t e = parse_int(t, w.lineno);
                if (e < 0 || e > 15)
                    throw AsmError(w.lineno, t.col, "pattern entry out of range");
                Instruction mi;
                mi.op = Opcode::movv;
                mi.sub = static_cast<uint8_t>(MovForm::r_imm);
                mi.rd = 31;
                mi.imm = static_cast<int32_t>(e);
                out.program.bundles[static_cast<size_t>(base + 1 + 2 * k)].slots[0] = mi;
                Instruction st;
                st.op = Opcode::st16;
                st.rd = 31;
                st.ra = 30;
                st.imm = k;
                out.program.bundles[static_cast<size_t>(base + 2 + 2 * k)].slots[0] = st;
            }
            continue;
        }

        // split on "||"
        std::vector<std::pair<std::string, int>> parts;
        {
            size_t p = 0;
            while (true) {
                size_t bar = w.text.find("||", p);
                std::string piece =
                    (bar == std::string::npos) ? w.text.substr(p) : w.text.substr(p, bar - p);
                parts.push_back({piece, w.col_base + static_cast<int>(p)});
                if (bar == std::string::npos) break;
                p = bar + 2;
            }
        }
        if (parts.size() > static_cast<size_t>(kNumSlots))
            throw AsmError(w.lineno, w.col_base, "more than 4 instructions in bundle");

        LineParse lp;
        for (auto& [piece, col0] : parts) {
            auto toks = tokenize(piece, w.lineno, col0);
            if (toks.empty())
                throw AsmError(w.lineno, col0, "empty instruction between '||'");
            Cursor c{toks, 0, w.lineno};
            parse_instr(c, lp, w.loc);
            if (!c.done())
                throw AsmError(w.lineno, c.peek().col,
                               "trailing tokens after instruction: '" + c.peek().text + "'");
        }

        Bundle& b = out.program.bundles[static_cast<size_t>(w.loc)];
        for (auto& [slot, in] : lp.slot_instrs) b.slots[static_cast<size_t>(slot)] = in;
        for (auto& pb : lp.branches) {
            pb.bundle = w.loc;
            branches.push_back(pb);
        }

        auto viol = legality_check(b);
        if (!viol.empty())
            throw AsmError(w.lineno, w.col_base,
                           "legality: " + viol.front().message);
    }

    // branch fixup (branches live on slot 0)
    for (const PendingBranch& pb : branches) {
        auto it = symbols.find(pb.label);
        if (it == symbols.end())
            throw AsmError(pb.line, pb.col, "unknown label '" + pb.label + "'");
        Bundle& b = out.program.bundles[static_cast<size_t>(pb.bundle)];
        Instruction& in = b.slots[0];
        if (in.op != Opcode::br && in.op != Opcode::brc)
            throw AsmError(pb.line, pb.col, "internal: branch not on slot 0");
        in.imm = it->second;
    }

    return out;
}

// ---------------------------------------------------------------------------
// Disassembler
// ---------------------------------------------------------------------------

namespace {

std::string mem_str(uint8_t ra, int32_t imm) {
    std::string s = "[R" + std::to_string(ra);
    if (imm > 0) s += " + " + std::to_string(imm);
    if (imm < 0) s += " - " + std::to_string(-imm);
    return s + "]";
}

std::string vec_operand_str(const VecOperand& o) {
    std::string r = "VR" + std::to_string(o.vr);
    switch (o.mode) {
        case VecMode::window: return r;
        case VecMode::broadcast: return r + ".bcast";
        case VecMode::permute:
            if (o.pattern >= kNumRuntimePatterns)
                return r + ".splat" + std::to_string(o.pattern - kNumRuntimePatterns);
            return r + ".perm" + std::to_string(o.pattern);
    }
    return r;
}

std::string instr_str(const Instruction& in) {
    std::string n = opcode_name(in.op);
    switch (in.op) {
        case Opcode::nop: return "NOP";
        case Opcode::halt: return "HALT";
        case Opcode::ld16: case Opcode::st16:
            return n + " R" + std::to_string(in.rd) + ", " + mem_str(in.ra, in.imm);
        case Opcode::ldv:
            if (in.mem_lb) {
                std::string s = n + " VR" + std::to_string(in.vr_d) + ", LB" +
                                std::to_string(in.sub) + "[R" + std::to_string(in.ra);
                if (in.imm > 0) s += " + " + std::to_string(in.imm);
                return s + "]";
            }
            return n + " VR" + std::to_string(in.vr_d) + ", " + mem_str(in.ra, in.imm);
        case Opcode::stv:
            return n + " VR" + std::to_string(in.vr_d) + ", " + mem_str(in.ra, in.imm);
        case Opcode::ldvl: case Opcode::stvl:
            return n + " VRl" + std::to_string(in.vrl_d) + ", " + mem_str(in.ra, in.imm);
        case Opcode::movv:
            switch (static_cast<MovForm>(in.sub)) {
                case MovForm::r_r:
                    return n + " R" + std::to_string(in.rd) + ", R" + std::to_string(in.ra);
                case MovForm::r_imm:
                    return n + " R" + std::to_string(in.rd) + ", #" + std::to_string(in.imm);
                case MovForm::vr_splat:
                    return n + " VR" + std::to_string(in.vr_d) + ", R" + std::to_string(in.ra);
                case MovForm::r_lane:
                    return n + " R" + std::to_string(in.rd) + ", VR" + std::to_string(in.vr_s) +
                           "[" + std::to_string(in.lane) + "]";
                case MovForm::vr_vr:
                    return n + " VR" + std::to_string(in.vr_d) + ", VR" + std::to_string(in.vr_s);
                case MovForm::vrl_vrl:
                    return n + " VRl" + std::to_string(in.vrl_d) + ", VRl" +
                           std::to_string(in.vrl_a);
            }
            return n;
        case Opcode::add: case Opcode::sub: case Opcode::mul:
        case Opcode::shl: case Opcode::shr: case Opcode::and_:
        case Opcode::or_: case Opcode::xor_: case Opcode::adda32: {
            std::string s = n + " R" + std::to_string(in.rd) + ", R" + std::to_string(in.ra) + ", ";
            if (in.use_imm) s += "#" + std::to_string(in.imm);
            else s += "R" + std::to_string(in.rb);
            return s;
        }
        case Opcode::cmp: {
            std::string s = n + " R" + std::to_string(in.ra) + ", ";
            if (in.use_imm) s += "#" + std::to_string(in.imm);
            else s += "R" + std::to_string(in.rb);
            return s;
        }
        case Opcode::br:
            return n + " " + std::to_string(in.imm);
        case Opcode::brc: {
            static const char* names[6] = {"EQ", "NE", "LT", "GE", "LE", "GT"};
            return n + " " + names[in.sub] + ", " + std::to_string(in.imm);
        }
        case Opcode::dma_submit: case Opcode::dma_wait:
            return n + " " + std::to_string(in.sub);
        case Opcode::lb_loadrow:
            return n + " " + std::to_string(in.sub) + ", R" + std::to_string(in.ra) + ", R" +
                   std::to_string(in.rb);
        case Opcode::lb_setstride:
            return n + " " + std::to_string(in.imm);
        case Opcode::vmac: case Opcode::vmull:
            return n + " VRl" + std::to_string(in.vrl_d) + ", " + vec_operand_str(in.a) + ", " +
                   vec_operand_str(in.b);
        case Opcode::vmac_lb: case Opcode::vmull_lb: {
            std::string s = n + " VRl" + std::to_string(in.vrl_d) + ", LB" +
                            std::to_string(in.lb.seg) + "[R" + std::to_string(in.lb.col_reg);
            if (in.lb.col_imm > 0) s += " + " + std::to_string(in.lb.col_imm);
            s += "], " + vec_operand_str(in.b);
            return s;
        }
        case Opcode::vaddl: case Opcode::vsubl:
            return n + " VRl" + std::to_string(in.vrl_d) + ", VRl" + std::to_string(in.vrl_a) +
                   ", VRl" + std::to_string(in.vrl_b);
        case Opcode::vclr:
            return n + " VRl" + std::to_string(in.vrl_d);
        case Opcode::vcvt:
            return n + " VR" + std::to_string(in.vr_d) + ", VRl" + std::to_string(in.vrl_a);
        case Opcode::vact: case Opcode::vmaxp: {
            std::string s = n + " VR" + std::to_string(in.vr_d) + ", VR" + std::to_string(in.vr_s);
            if (in.a.mode == VecMode::permute) {
                if (in.a.pattern >= kNumRuntimePatterns)
                    s += ".splat" + std::to_string(in.a.pattern - kNumRuntimePatterns);
                else
                    s += ".perm" + std::to_string(in.a.pattern);
            }
            return s;
        }
    }
    return n;
}

}  // namespace

std::string disassemble(const Program& p) {
    std::ostringstream os;
    for (const Bundle& b : p.bundles) {
        if (b.all_nop()) {
            os << "NOP\n";
            continue;
        }
        bool first = true;
        for (int s = 0; s < kNumSlots; s++) {
            const Instruction& in = b.slots[static_cast<size_t>(s)];
            if (in.is_nop()) continue;
            if (!first) os << " || ";
            os << instr_str(in);
            first = false;
        }
        os << "\n";
    }
    return os.str();
}

std::string symbol_map_text(const Assembled& a) {
    std::ostringstream os;
    for (auto& [name, idx] : a.symbols) os << name << " " << idx << "\n";
    return os.str();
}

}  // namespace cvx
