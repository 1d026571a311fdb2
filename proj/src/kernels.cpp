// Kernel variant selection. The choice is process-wide and sticky: it is
// made on first use (env override QLCAUSE_KERNELS, else best available) and
// can be changed explicitly via select(), which tests use to compare
// variants.

#include "qlcause/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_variants.hpp"

namespace qlcause::kernels {
namespace {

std::atomic<const Ops*> g_active{nullptr};

const Ops* find(std::string_view name) {
    for (const Ops* ops : available())
        if (name == ops->name)
            return ops;
    return nullptr;
}

const Ops* choose_default() {
    if (const char* env = std::getenv("QLCAUSE_KERNELS"))
        if (const Ops* forced = find(env))
            return forced;
    const Ops* best = &scalar();
    for (const Ops* ops : available())
        best = ops; // available() lists scalar first, best last
    return best;
}

} // namespace

std::vector<const Ops*> available() {
    std::vector<const Ops*> out{&scalar()};
    if (const Ops* neon = detail::neon_ops())
        out.push_back(neon);
    if (const Ops* avx2 = detail::avx2_ops())
        out.push_back(avx2);
    return out;
}

const Ops& active() {
    const Ops* cur = g_active.load(std::memory_order_acquire);
    if (!cur) {
        cur = choose_default();
        const Ops* expected = nullptr;
        if (!g_active.compare_exchange_strong(expected, cur,
                                              std::memory_order_acq_rel))
            cur = expected;
    }
    return *cur;
}

bool select(std::string_view name) {
    const Ops* ops = find(name);
    if (!ops)
        return false;
    g_active.store(ops, std::memory_order_release);
    return true;
}

} // namespace qlcause::kernels
