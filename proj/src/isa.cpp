#include "cvx/isa.hpp"

#include <cstring>
#include <fstream>

namespace cvx {

const char* opcode_name(Opcode op) {
    switch (op) {
        case Opcode::nop: return "NOP";
        case Opcode::ld16: return "LD16";
        case Opcode::st16: return "ST16";
        case Opcode::ldv: return "LDV";
        case Opcode::stv: return "STV";
        case Opcode::ldvl: return "LDVL";
        case Opcode::stvl: return "STVL";
        case Opcode::movv: return "MOVV";
        case Opcode::add: return "ADD";
        case Opcode::sub: return "SUB";
        case Opcode::mul: return "MUL";
        case Opcode::shl: return "SHL";
        case Opcode::shr: return "SHR";
        case Opcode::and_: return "AND";
        case Opcode::or_: return "OR";
        case Opcode::xor_: return "XOR";
        case Opcode::cmp: return "CMP";
        case Opcode::adda32: return "ADDA32";
        case Opcode::br: return "BR";
        case Opcode::brc: return "BRC";
        case Opcode::halt: return "HALT";
        case Opcode::dma_submit: return "DMA.SUBMIT";
        case Opcode::dma_wait: return "DMA.WAIT";
        case Opcode::lb_loadrow: return "LB.LOADROW";
        case Opcode::lb_setstride: return "LB.SETSTRIDE";
        case Opcode::vmac: return "VMAC";
        case Opcode::vmac_lb: return "VMAC";
        case Opcode::vmull: return "VMULL";
        case Opcode::vmull_lb: return "VMULL";
        case Opcode::vaddl: return "VADDL";
        case Opcode::vsubl: return "VSUBL";
        case Opcode::vclr: return "VCLR";
        case Opcode::vcvt: return "VCVT";
        case Opcode::vact: return "VACT";
        case Opcode::vmaxp: return "VMAXP";
    }
    return "?";
}

bool is_vector_opcode(Opcode op) {
    return static_cast<uint8_t>(op) >= 32;
}

bool is_sfu_opcode(Opcode op) {
    return op == Opcode::vact || op == Opcode::vmaxp;
}

// ---------------------------------------------------------------------------
// Legality
// ---------------------------------------------------------------------------

static void check_vec_operand(int slot, const VecOperand& o, std::vector<Violation>& out) {
    int own_region = slot;  // vector slot i owns VR sub-region i
    if (o.vr >= kNumVR) {
        out.push_back({slot, "VR index out of range"});
        return;
    }
    int region = o.vr / 4;
    if (region != 0 && region != own_region) {
        out.push_back({slot, "slot " + std::to_string(slot) +
                                 " cannot access sub-region VR" + std::to_string(region)});
    }
    if (o.mode == VecMode::window || o.mode == VecMode::permute) {
        if (o.vr % 4 != 0)
            out.push_back({slot, "window base VR" + std::to_string(o.vr) + " not 4-aligned"});
    }
    if (o.mode == VecMode::permute && o.pattern >= kNumPatterns)
        out.push_back({slot, "pattern id out of range"});
}

static void check_vrl_private(int slot, uint8_t vrl, std::vector<Violation>& out) {
    if (vrl >= kNumVRl) {
        out.push_back({slot, "VRl index out of range"});
        return;
    }
    int region = vrl / 4;
    if (region != slot - 1)
        out.push_back({slot, "slot " + std::to_string(slot) +
                                 " cannot access sub-region VRl" + std::to_string(region)});
}

std::vector<Violation> legality_check(const Bundle& b) {
    std::vector<Violation> out;
    for (int s = 0; s < kNumSlots; s++) {
        const Instruction& in = b.slots[s];
        if (in.is_nop()) continue;
        bool vec = is_vector_opcode(in.op);
        if (s == 0 && vec) {
            out.push_back({0, std::string(opcode_name(in.op)) + " not legal on slot 0"});
            continue;
        }
        if (s != 0 && !vec) {
            out.push_back({s, std::string(opcode_name(in.op)) + " requires slot 0"});
            continue;
        }
        if (is_sfu_opcode(in.op) && s != 1) {
            out.push_back({s, "SFU opcode restricted to slot 1"});
            continue;
        }
        switch (in.op) {
            case Opcode::vmac:
            case Opcode::vmull:
                check_vec_operand(s, in.a, out);
                check_vec_operand(s, in.b, out);
                if (in.vrl_d != 4 * (s - 1))
                    out.push_back({s, "accumulator must be the private sub-region base VRl" +
                                          std::to_string(4 * (s - 1))});
                break;
            case Opcode::vmac_lb:
            case Opcode::vmull_lb:
                if (in.lb.seg >= kLbSegments) out.push_back({s, "line-buffer segment out of range"});
                if (in.lb.col_reg >= kNumR) out.push_back({s, "column register out of range"});
                if (in.lb.col_imm >= kLbSegmentElems)
                    out.push_back({s, "column offset out of range"});
                check_vec_operand(s, in.b, out);
                if (in.vrl_d != 4 * (s - 1))
                    out.push_back({s, "accumulator must be the private sub-region base VRl" +
                                          std::to_string(4 * (s - 1))});
                break;
            case Opcode::vaddl:
            case Opcode::vsubl:
                check_vrl_private(s, in.vrl_d, out);
                check_vrl_private(s, in.vrl_a, out);
                check_vrl_private(s, in.vrl_b, out);
                break;
            case Opcode::vclr:
                check_vrl_private(s, in.vrl_d, out);
                break;
            case Opcode::vcvt:
                check_vrl_private(s, in.vrl_a, out);
                if (in.vr_d >= kNumVR || in.vr_d / 4 != s)
                    out.push_back({s, "VCVT destination must lie in sub-region VR" +
                                          std::to_string(s)});
                break;
            case Opcode::vact:
            case Opcode::vmaxp: {
                if (in.vr_d >= kNumVR || in.vr_d / 4 != 1)
                    out.push_back({s, "SFU destination must lie in sub-region VR1"});
                if (in.vr_s >= kNumVR || (in.vr_s / 4 != 0 && in.vr_s / 4 != 1))
                    out.push_back({s, "SFU source must lie in sub-region VR0 or VR1"});
                if (in.a.mode == VecMode::permute && in.a.pattern >= kNumPatterns)
                    out.push_back({s, "pattern id out of range"});
                break;
            }
            default: break;  // scalar ops on slot 0: register ranges checked below
        }
        if (s == 0) {
            auto chk_r = [&](uint8_t r) {
                if (r >= kNumR) out.push_back({0, "R index out of range"});
            };
            auto chk_vr = [&](uint8_t r) {
                if (r >= kNumVR) out.push_back({0, "VR index out of range"});
            };
            auto chk_vrl = [&](uint8_t r) {
                if (r >= kNumVRl) out.push_back({0, "VRl index out of range"});
            };
            switch (in.op) {
                case Opcode::ld16: case Opcode::st16:
                    chk_r(in.rd); chk_r(in.ra);
                    break;
                case Opcode::ldv:
                    chk_vr(in.vr_d);
                    if (in.mem_lb) {
                        chk_r(in.ra);
                        if (in.sub >= kLbSegments) out.push_back({0, "segment out of range"});
                    } else {
                        chk_r(in.ra);
                    }
                    break;
                case Opcode::stv: chk_vr(in.vr_d); chk_r(in.ra); break;
                case Opcode::ldvl: case Opcode::stvl: chk_vrl(in.vrl_d); chk_r(in.ra); break;
                case Opcode::movv:
                    switch (static_cast<MovForm>(in.sub)) {
                        case MovForm::r_r: chk_r(in.rd); chk_r(in.ra); break;
                        case MovForm::r_imm: chk_r(in.rd); break;
                        case MovForm::vr_splat: chk_vr(in.vr_d); chk_r(in.ra); break;
                        case MovForm::r_lane:
                            chk_r(in.rd); chk_vr(in.vr_s);
                            if (in.lane >= kLanes) out.push_back({0, "lane out of range"});
                            break;
                        case MovForm::vr_vr: chk_vr(in.vr_d); chk_vr(in.vr_s); break;
                        case MovForm::vrl_vrl: chk_vrl(in.vrl_d); chk_vrl(in.vrl_a); break;
                    }
                    break;
                case Opcode::add: case Opcode::sub: case Opcode::mul:
                case Opcode::shl: case Opcode::shr: case Opcode::and_:
                case Opcode::or_: case Opcode::xor_: case Opcode::adda32:
                    chk_r(in.rd); chk_r(in.ra);
                    if (!in.use_imm) chk_r(in.rb);
                    break;
                case Opcode::cmp:
                    chk_r(in.ra);
                    if (!in.use_imm) chk_r(in.rb);
                    break;
                case Opcode::br: case Opcode::brc:
                    if (in.imm < 0 || in.imm >= kPmBundles)
                        out.push_back({0, "branch target out of range"});
                    break;
                case Opcode::dma_submit: case Opcode::dma_wait:
                    if (in.sub >= 4) out.push_back({0, "descriptor slot out of range"});
                    break;
                case Opcode::lb_loadrow:
                    if (in.sub >= kLbSegments) out.push_back({0, "segment out of range"});
                    chk_r(in.ra); chk_r(in.rb);
                    break;
                case Opcode::lb_setstride:
                    if (in.imm < 0 || in.imm > 15) out.push_back({0, "stride out of range"});
                    break;
                default: break;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Encoding. 32 bits per slot, opcode in [31:26]. See docs/isa.md.
// ---------------------------------------------------------------------------

namespace {

struct Packer {
    uint32_t w = 0;
    void put(int hi, int lo, uint32_t v) {
        uint32_t width = hi - lo + 1;
        uint32_t mask = (width == 32) ? 0xFFFFFFFFu : ((1u << width) - 1);
        w |= (v & mask) << lo;
    }
};

struct Unpacker {
    uint32_t w;
    uint32_t get(int hi, int lo) const {
        uint32_t width = hi - lo + 1;
        uint32_t mask = (width == 32) ? 0xFFFFFFFFu : ((1u << width) - 1);
        return (w >> lo) & mask;
    }
    int32_t get_s(int hi, int lo) const {  // sign-extended
        uint32_t width = hi - lo + 1;
        uint32_t v = get(hi, lo);
        uint32_t sign = 1u << (width - 1);
        return static_cast<int32_t>((v ^ sign)) - static_cast<int32_t>(sign);
    }
};

uint32_t vr_rel(int slot, const VecOperand& o) {
    // 3-bit relative register field: bit2 = private region, bits1:0 = index.
    uint32_t priv = (o.vr >= 4) ? 1u : 0u;
    (void)slot;
    return (priv << 2) | (o.vr & 3u);
}

uint8_t vr_abs(int slot, uint32_t rel) {
    uint32_t idx = rel & 3u;
    return static_cast<uint8_t>((rel & 4u) ? slot * 4 + idx : idx);
}

uint32_t pack_vec_operand(int slot, const VecOperand& o, int mode_hi, int reg_hi, int pat_hi,
                          Packer& p) {
    p.put(mode_hi, mode_hi - 1, static_cast<uint32_t>(o.mode));
    p.put(reg_hi, reg_hi - 2, vr_rel(slot, o));
    p.put(pat_hi, pat_hi - 4, o.pattern);
    return 0;
}

VecOperand unpack_vec_operand(int slot, const Unpacker& u, int mode_hi, int reg_hi, int pat_hi) {
    VecOperand o;
    uint32_t m = u.get(mode_hi, mode_hi - 1);
    if (m > 2) throw DecodeError("bad operand mode");
    o.mode = static_cast<VecMode>(m);
    o.vr = vr_abs(slot, u.get(reg_hi, reg_hi - 2));
    o.pattern = static_cast<uint8_t>(u.get(pat_hi, pat_hi - 4));
    if (o.pattern >= kNumPatterns) throw DecodeError("bad pattern id");
    return o;
}

}  // namespace

std::array<uint32_t, 4> encode_bundle(const Bundle& b) {
    std::array<uint32_t, 4> out{};
    for (int s = 0; s < kNumSlots; s++) {
        const Instruction& in = b.slots[s];
        Packer p;
        p.put(31, 26, static_cast<uint32_t>(in.op));
        switch (in.op) {
            case Opcode::nop:
            case Opcode::halt:
                break;
            case Opcode::ld16:
            case Opcode::st16:
                p.put(25, 21, in.rd);
                p.put(20, 16, in.ra);
                p.put(15, 0, static_cast<uint32_t>(in.imm));
                break;
            case Opcode::ldv:
                p.put(25, 22, in.vr_d);
                p.put(21, 21, in.mem_lb ? 1 : 0);
                if (in.mem_lb) {
                    p.put(20, 19, in.sub);
                    p.put(18, 14, in.ra);
                    p.put(13, 0, static_cast<uint32_t>(in.imm));
                } else {
                    p.put(20, 16, in.ra);
                    p.put(15, 0, static_cast<uint32_t>(in.imm));
                }
                break;
            case Opcode::stv:
                p.put(25, 22, in.vr_d);
                p.put(20, 16, in.ra);
                p.put(15, 0, static_cast<uint32_t>(in.imm));
                break;
            case Opcode::ldvl:
            case Opcode::stvl:
                p.put(25, 22, in.vrl_d);
                p.put(20, 16, in.ra);
                p.put(15, 0, static_cast<uint32_t>(in.imm));
                break;
            case Opcode::movv:
                p.put(25, 23, in.sub);
                switch (static_cast<MovForm>(in.sub)) {
                    case MovForm::r_r: p.put(22, 18, in.rd); p.put(17, 13, in.ra); break;
                    case MovForm::r_imm: p.put(22, 18, in.rd); p.put(15, 0, static_cast<uint32_t>(in.imm)); break;
                    case MovForm::vr_splat: p.put(22, 19, in.vr_d); p.put(18, 14, in.ra); break;
                    case MovForm::r_lane:
                        p.put(22, 18, in.rd); p.put(17, 14, in.vr_s); p.put(13, 10, in.lane);
                        break;
                    case MovForm::vr_vr: p.put(22, 19, in.vr_d); p.put(18, 15, in.vr_s); break;
                    case MovForm::vrl_vrl: p.put(22, 19, in.vrl_d); p.put(18, 15, in.vrl_a); break;
                }
                break;
            case Opcode::add: case Opcode::sub: case Opcode::mul:
            case Opcode::shl: case Opcode::shr: case Opcode::and_:
            case Opcode::or_: case Opcode::xor_: case Opcode::adda32:
                p.put(25, 21, in.rd);
                p.put(20, 16, in.ra);
                p.put(15, 15, in.use_imm ? 1 : 0);
                if (in.use_imm)
                    p.put(14, 0, static_cast<uint32_t>(in.imm));
                else
                    p.put(14, 10, in.rb);
                break;
            case Opcode::cmp:
                p.put(25, 21, in.ra);
                p.put(20, 20, in.use_imm ? 1 : 0);
                if (in.use_imm)
                    p.put(15, 0, static_cast<uint32_t>(in.imm));
                else
                    p.put(19, 15, in.rb);
                break;
            case Opcode::br:
                p.put(9, 0, static_cast<uint32_t>(in.imm));
                break;
            case Opcode::brc:
                p.put(25, 23, in.sub);
                p.put(9, 0, static_cast<uint32_t>(in.imm));
                break;
            case Opcode::dma_submit:
            case Opcode::dma_wait:
                p.put(25, 24, in.sub);
                break;
            case Opcode::lb_loadrow:
                p.put(25, 24, in.sub);
                p.put(23, 19, in.ra);
                p.put(18, 14, in.rb);
                break;
            case Opcode::lb_setstride:
                p.put(25, 22, static_cast<uint32_t>(in.imm));
                break;
            case Opcode::vmac:
            case Opcode::vmull:
                pack_vec_operand(s, in.a, 25, 23, 20, p);
                pack_vec_operand(s, in.b, 15, 13, 10, p);
                break;
            case Opcode::vmac_lb:
            case Opcode::vmull_lb:
                p.put(25, 24, in.lb.seg);
                p.put(23, 19, in.lb.col_reg);
                p.put(18, 10, in.lb.col_imm);
                pack_vec_operand(s, in.b, 9, 7, 4, p);
                break;
            case Opcode::vaddl:
            case Opcode::vsubl:
                p.put(25, 22, in.vrl_d);
                p.put(21, 18, in.vrl_a);
                p.put(17, 14, in.vrl_b);
                break;
            case Opcode::vclr:
                p.put(25, 22, in.vrl_d);
                break;
            case Opcode::vcvt:
                p.put(25, 22, in.vr_d);
                p.put(21, 18, in.vrl_a);
                break;
            case Opcode::vact:
            case Opcode::vmaxp:
                p.put(25, 22, in.vr_d);
                p.put(21, 20, static_cast<uint32_t>(in.a.mode));
                p.put(19, 16, in.vr_s);
                p.put(15, 11, in.a.pattern);
                break;
        }
        out[s] = p.w;
    }
    return out;
}

Bundle decode_bundle(const std::array<uint32_t, 4>& words) {
    Bundle b;
    for (int s = 0; s < kNumSlots; s++) {
        Unpacker u{words[s]};
        uint32_t opv = u.get(31, 26);
        Instruction in;
        bool scalar_ok = opv <= 24;
        bool vector_ok = opv == 0 || (opv >= 32 && opv <= 41);
        if (s == 0 ? !scalar_ok : !vector_ok)
            throw DecodeError("reserved opcode " + std::to_string(opv) + " in slot " +
                              std::to_string(s));
        in.op = static_cast<Opcode>(opv);
        switch (in.op) {
            case Opcode::nop:
            case Opcode::halt:
                if ((u.w & 0x03FFFFFF) != 0) throw DecodeError("nonzero payload in NOP/HALT");
                break;
            case Opcode::ld16:
            case Opcode::st16:
                in.rd = u.get(25, 21); in.ra = u.get(20, 16); in.imm = u.get_s(15, 0);
                break;
            case Opcode::ldv:
                in.vr_d = u.get(25, 22);
                in.mem_lb = u.get(21, 21) != 0;
                if (in.mem_lb) {
                    in.sub = u.get(20, 19);
                    in.ra = u.get(18, 14);
                    in.imm = static_cast<int32_t>(u.get(13, 0));
                } else {
                    in.ra = u.get(20, 16);
                    in.imm = u.get_s(15, 0);
                }
                break;
            case Opcode::stv:
                in.vr_d = u.get(25, 22); in.ra = u.get(20, 16); in.imm = u.get_s(15, 0);
                break;
            case Opcode::ldvl:
            case Opcode::stvl:
                in.vrl_d = u.get(25, 22); in.ra = u.get(20, 16); in.imm = u.get_s(15, 0);
                if (in.vrl_d >= kNumVRl) throw DecodeError("VRl index out of range");
                break;
            case Opcode::movv: {
                in.sub = u.get(25, 23);
                if (in.sub > 5) throw DecodeError("bad MOVV form");
                switch (static_cast<MovForm>(in.sub)) {
                    case MovForm::r_r: in.rd = u.get(22, 18); in.ra = u.get(17, 13); break;
                    case MovForm::r_imm: in.rd = u.get(22, 18); in.imm = u.get_s(15, 0); break;
                    case MovForm::vr_splat: in.vr_d = u.get(22, 19); in.ra = u.get(18, 14); break;
                    case MovForm::r_lane:
                        in.rd = u.get(22, 18); in.vr_s = u.get(17, 14); in.lane = u.get(13, 10);
                        break;
                    case MovForm::vr_vr: in.vr_d = u.get(22, 19); in.vr_s = u.get(18, 15); break;
                    case MovForm::vrl_vrl:
                        in.vrl_d = u.get(22, 19); in.vrl_a = u.get(18, 15);
                        if (in.vrl_d >= kNumVRl || in.vrl_a >= kNumVRl)
                            throw DecodeError("VRl index out of range");
                        break;
                }
                break;
            }
            case Opcode::add: case Opcode::sub: case Opcode::mul:
            case Opcode::shl: case Opcode::shr: case Opcode::and_:
            case Opcode::or_: case Opcode::xor_: case Opcode::adda32:
                in.rd = u.get(25, 21); in.ra = u.get(20, 16);
                in.use_imm = u.get(15, 15) != 0;
                if (in.use_imm) in.imm = u.get_s(14, 0);
                else in.rb = u.get(14, 10);
                break;
            case Opcode::cmp:
                in.ra = u.get(25, 21);
                in.use_imm = u.get(20, 20) != 0;
                if (in.use_imm) in.imm = u.get_s(15, 0);
                else in.rb = u.get(19, 15);
                break;
            case Opcode::br:
                in.imm = static_cast<int32_t>(u.get(9, 0));
                break;
            case Opcode::brc:
                in.sub = u.get(25, 23);
                if (in.sub > 5) throw DecodeError("bad branch condition");
                in.imm = static_cast<int32_t>(u.get(9, 0));
                break;
            case Opcode::dma_submit:
            case Opcode::dma_wait:
                in.sub = u.get(25, 24);
                break;
            case Opcode::lb_loadrow:
                in.sub = u.get(25, 24); in.ra = u.get(23, 19); in.rb = u.get(18, 14);
                break;
            case Opcode::lb_setstride:
                in.imm = static_cast<int32_t>(u.get(25, 22));
                break;
            case Opcode::vmac:
            case Opcode::vmull:
                in.a = unpack_vec_operand(s, u, 25, 23, 20);
                in.b = unpack_vec_operand(s, u, 15, 13, 10);
                in.vrl_d = static_cast<uint8_t>(4 * (s - 1));
                break;
            case Opcode::vmac_lb:
            case Opcode::vmull_lb:
                in.lb.seg = u.get(25, 24);
                in.lb.col_reg = u.get(23, 19);
                in.lb.col_imm = u.get(18, 10);
                in.b = unpack_vec_operand(s, u, 9, 7, 4);
                in.vrl_d = static_cast<uint8_t>(4 * (s - 1));
                break;
            case Opcode::vaddl:
            case Opcode::vsubl:
                in.vrl_d = u.get(25, 22); in.vrl_a = u.get(21, 18); in.vrl_b = u.get(17, 14);
                if (in.vrl_d >= kNumVRl || in.vrl_a >= kNumVRl || in.vrl_b >= kNumVRl)
                    throw DecodeError("VRl index out of range");
                break;
            case Opcode::vclr:
                in.vrl_d = u.get(25, 22);
                if (in.vrl_d >= kNumVRl) throw DecodeError("VRl index out of range");
                break;
            case Opcode::vcvt:
                in.vr_d = u.get(25, 22); in.vrl_a = u.get(21, 18);
                if (in.vrl_a >= kNumVRl) throw DecodeError("VRl index out of range");
                break;
            case Opcode::vact:
            case Opcode::vmaxp: {
                in.vr_d = u.get(25, 22);
                uint32_t m = u.get(21, 20);
                if (m > 2) throw DecodeError("bad operand mode");
                in.a.mode = static_cast<VecMode>(m);
                in.vr_s = u.get(19, 16);
                in.a.pattern = u.get(15, 11);
                if (in.a.pattern >= kNumPatterns) throw DecodeError("bad pattern id");
                break;
            }
        }
        b.slots[s] = in;
    }
    return b;
}

// ---------------------------------------------------------------------------
// .cvx container
// ---------------------------------------------------------------------------

static const char kMagic[4] = {'C', 'V', 'X', '1'};

std::vector<uint8_t> program_to_bytes(const Program& p) {
    std::vector<uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    uint32_t n = static_cast<uint32_t>(p.bundles.size());
    for (int i = 0; i < 4; i++) out.push_back(static_cast<uint8_t>(n >> (8 * i)));
    for (const Bundle& b : p.bundles) {
        auto words = encode_bundle(b);
        for (uint32_t w : words)
            for (int i = 0; i < 4; i++) out.push_back(static_cast<uint8_t>(w >> (8 * i)));
    }
    return out;
}

Program program_from_bytes(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw DecodeError("bad magic (expected CVX1)");
    uint32_t n = 0;
    for (int i = 0; i < 4; i++) n |= static_cast<uint32_t>(bytes[4 + i]) << (8 * i);
    if (n > kPmBundles) throw DecodeError("bundle count exceeds program memory");
    if (bytes.size() != 8 + size_t(n) * 16) throw DecodeError("truncated program");
    Program p;
    p.bundles.reserve(n);
    for (uint32_t k = 0; k < n; k++) {
        std::array<uint32_t, 4> words{};
        for (int s = 0; s < 4; s++) {
            uint32_t w = 0;
            for (int i = 0; i < 4; i++)
                w |= static_cast<uint32_t>(bytes[8 + k * 16 + s * 4 + i]) << (8 * i);
            words[s] = w;
        }
        try {
            p.bundles.push_back(decode_bundle(words));
        } catch (const DecodeError& e) {
            throw DecodeError("bundle " + std::to_string(k) + ": " + e.what());
        }
    }
    return p;
}

void save_program(const Program& p, const std::string& path) {
    auto bytes = program_to_bytes(p);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Program load_program(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                               std::istreambuf_iterator<char>());
    return program_from_bytes(bytes);
}

}  // namespace cvx
