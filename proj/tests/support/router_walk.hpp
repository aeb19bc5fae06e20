// Copyright 2026 The PriceScope Authors
// SPDX-License-Identifier: Apache-2.0

// In-memory router walk-through: the attack contract calls a router which
// moves seven transfers, T4 emitted after T2 and T3.

#pragma once

#include "support/builder.hpp"

namespace pricescope::testing {

struct RouterWalk {
    Address eoa = addr(1), attack = addr(2), router = addr(3);
    Address ca[7] = {{}, addr(11), addr(12), addr(13), addr(14), addr(15), addr(16)};
    Address tokA = addr(101), tokB = addr(102), tokC = addr(103), tokD = addr(104);
    TransactionTrace trace;

    RouterWalk() {
        trace.initiator = eoa;
        trace.entry = frame(eoa, attack);
        CallFrame& r = add_child(trace.entry, router);
        auto emit = [&](const Address& token, const Address& from, const Address& to, unsigned v) {
            CallFrame& t = add_child(r, token);
            t.logs.push_back(transfer_log(token, from, to, v));
        };
        emit(tokA, attack, ca[1], 100);  // T1
        emit(tokA, attack, ca[4], 10);   // T2
        emit(tokC, attack, ca[5], 20);   // T3
        emit(tokB, ca[1], ca[2], 90);    // T4
        emit(tokC, ca[2], ca[3], 80);    // T5
        emit(tokC, ca[5], ca[6], 20);    // T6
        emit(tokD, ca[3], attack, 70);   // T7
    }
};

}  // namespace pricescope::testing
