// SPDX-License-Identifier: Apache-2.0

//! Logical-to-physical layout and SWAP routing.

mod coupling;
mod layout;
mod route;

pub use coupling::CouplingMap;
pub use layout::{Layout, LayoutPolicy};
pub use route::{
    route, route_plan, swap_overhead_report, PlanRouting, RoutedCircuit, RouterPolicy,
    RoutingOptions, SwapRow, SwapTable, LOOKAHEAD_WINDOW,
};
