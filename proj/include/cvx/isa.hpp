#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cvx {

// Machine geometry. These are fixed by the architecture; changing any of
// them invalidates the binary format.
inline constexpr int kNumSlots = 4;          // slot 0 scalar/control, 1..3 vector
inline constexpr int kNumVectorSlots = 3;
inline constexpr int kSlicesPerAlu = 4;
inline constexpr int kLanes = 16;
inline constexpr int kMacsPerVmac = kSlicesPerAlu * kLanes;   // 64
inline constexpr int kMacUnits = kNumVectorSlots * kMacsPerVmac;  // 192
inline constexpr int kNumR = 32;
inline constexpr int kNumVR = 16;   // 256-bit regs, 4 sub-regions of 4
inline constexpr int kNumVRl = 12;  // 512-bit regs, 3 sub-regions of 4
inline constexpr int kPmBundles = 1024;          // 16 KByte program memory
inline constexpr int kDmBytes = 128 * 1024;      // data memory
inline constexpr int kDmWords = kDmBytes / 2;
inline constexpr int kDmBanks = 16;
inline constexpr int kLbSegments = 4;
inline constexpr int kLbSegmentElems = 512;
inline constexpr uint64_t kDefaultClockHz = 400u * 1000u * 1000u;

enum class RegFile : uint8_t { r, vr, vrl };

struct RegRef {
    RegFile file = RegFile::r;
    uint8_t index = 0;

    // VR index/4 -> sub-regions VR0..VR3; VRl index/4 -> VRl0..VRl2.
    int sub_region() const { return index / 4; }
    bool valid() const {
        switch (file) {
            case RegFile::r: return index < kNumR;
            case RegFile::vr: return index < kNumVR;
            case RegFile::vrl: return index < kNumVRl;
        }
        return false;
    }
};

// Opcodes. Values are the binary encoding's 6-bit opcode field. 0 doubles
// as NOP (scalar slot) and VNOP (vector slots); an all-zero word is the
// canonical NOP in every slot.
enum class Opcode : uint8_t {
    nop = 0,
    ld16 = 1,
    st16 = 2,
    ldv = 3,
    stv = 4,
    ldvl = 5,
    stvl = 6,
    movv = 7,
    add = 8,
    sub = 9,
    mul = 10,
    shl = 11,
    shr = 12,
    and_ = 13,
    or_ = 14,
    xor_ = 15,
    cmp = 16,
    adda32 = 17,
    br = 18,
    brc = 19,
    halt = 20,
    dma_submit = 21,
    dma_wait = 22,
    lb_loadrow = 23,
    lb_setstride = 24,
    // vector slot opcodes
    vmac = 32,
    vmac_lb = 33,
    vmull = 34,
    vmull_lb = 35,
    vaddl = 36,
    vsubl = 37,
    vclr = 38,
    vcvt = 39,
    vact = 40,   // slot 1 only
    vmaxp = 41,  // slot 1 only
};

const char* opcode_name(Opcode op);
bool is_vector_opcode(Opcode op);
bool is_sfu_opcode(Opcode op);

// MOVV sub-forms.
enum class MovForm : uint8_t {
    r_r = 0,       // Rd <- Rs
    r_imm = 1,     // Rd <- imm16
    vr_splat = 2,  // VRd lanes <- Rs (replicate)
    r_lane = 3,    // Rd <- VRs[lane]
    vr_vr = 4,     // VRd <- VRs
    vrl_vrl = 5,   // VRld <- VRls
};

enum class BranchCond : uint8_t { eq = 0, ne = 1, lt = 2, ge = 3, le = 4, gt = 5 };

// Vector source operand modes. window: slice s reads register (base + s) of
// a 4-register aligned window. broadcast: one register replicated to all
// slices. permute: like window, but lanes are shuffled through a pattern
// table before use. Patterns 0..3 are the runtime-loaded tables; patterns
// 4..19 are hardwired splat tables (all entries = pattern - 4).
enum class VecMode : uint8_t { window = 0, broadcast = 1, permute = 2 };

inline constexpr int kNumRuntimePatterns = 4;
inline constexpr int kNumPatterns = 20;  // 4 runtime + 16 hardwired splats

struct VecOperand {
    VecMode mode = VecMode::broadcast;
    uint8_t vr = 0;       // raw VR index; window/permute require 4-aligned base
    uint8_t pattern = 0;  // permute only, 0..19
};

// Line-buffer sourced operand: 16 lanes read from segment `seg` starting at
// element R[col_reg] + col_imm, stepping by the line-buffer stride register.
struct LbOperand {
    uint8_t seg = 0;
    uint8_t col_reg = 0;
    uint16_t col_imm = 0;  // 0..511
};

// One slot's instruction. A flat record: which fields are meaningful
// depends on op (see encode/decode in isa.cpp for the authoritative map).
struct Instruction {
    Opcode op = Opcode::nop;

    // scalar fields
    uint8_t rd = 0, ra = 0, rb = 0;
    bool use_imm = false;
    int32_t imm = 0;          // immediate / branch target / stride
    uint8_t sub = 0;          // MovForm, BranchCond, dma slot, lb segment
    uint8_t vr_d = 0, vr_s = 0;   // VR operands (ldv/stv/movv/vcvt/sfu)
    uint8_t vrl_d = 0, vrl_a = 0, vrl_b = 0;  // VRl operands
    uint8_t lane = 0;         // movv r_lane
    bool mem_lb = false;      // ldv: source is line buffer

    // vector op fields
    VecOperand a{}, b{};
    LbOperand lb{};

    bool is_nop() const { return op == Opcode::nop; }
};

// One VLIW issue packet: 4 slots, NOP = empty. Encodes to 128 bits.
struct Bundle {
    std::array<Instruction, kNumSlots> slots{};

    bool all_nop() const {
        for (auto& i : slots)
            if (!i.is_nop()) return false;
        return true;
    }
};

struct Violation {
    int slot;
    std::string message;
};

// Returns every slot/opcode/register-region violation; legal iff empty.
// Slot access rules: slot 0 reaches all register files; vector slot i reads
// VR sub-regions VR0 and VRi, writes VRi, and reads/writes only VRl(i-1);
// SFU opcodes are restricted to slot 1.
std::vector<Violation> legality_check(const Bundle& b);

struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 128-bit bundle <-> 4 little-endian 32-bit slot words.
std::array<uint32_t, 4> encode_bundle(const Bundle& b);
Bundle decode_bundle(const std::array<uint32_t, 4>& words);  // throws DecodeError

// Assembled program plus .cvx container (magic "CVX1", u32 bundle count,
// then 16 bytes per bundle, little-endian).
struct Program {
    std::vector<Bundle> bundles;
};

std::vector<uint8_t> program_to_bytes(const Program& p);
Program program_from_bytes(const std::vector<uint8_t>& bytes);  // throws DecodeError
void save_program(const Program& p, const std::string& path);
Program load_program(const std::string& path);

}  // namespace cvx
