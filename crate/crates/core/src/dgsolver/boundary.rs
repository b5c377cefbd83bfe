use super::mesh::BoundaryKind;
use crate::error::{Error, Result};
use crate::physflux::Direction;
use crate::state::{em, EmState, FullPrim, Species, State, EM};

/// Ghost state across a non-periodic boundary whose normal is `dir`.
/// Periodic sides are handled by index wrapping and are rejected here.
pub fn ghost_state(u: &State, w: &FullPrim, kind: BoundaryKind, dir: Direction) -> Result<(State, FullPrim)> {
    match kind {
        BoundaryKind::Periodic => Err(Error::config("periodic boundaries have no ghost state")),
        BoundaryKind::Neumann => Ok((*u, *w)),
        BoundaryKind::ConductingWall => Ok(reflect(u, w, dir)),
    }
}

/// Mirror state for a perfectly conducting wall: normal velocity, tangential
/// electric field and normal magnetic field change sign.
pub fn reflect(u: &State, w: &FullPrim, dir: Direction) -> (State, FullPrim) {
    let g = reflect_state(u, dir);
    let mut gw = *w;
    match dir {
        Direction::X => {
            gw.ion.vx = -gw.ion.vx;
            gw.electron.vx = -gw.electron.vx;
        }
        Direction::Y => {
            gw.ion.vy = -gw.ion.vy;
            gw.electron.vy = -gw.electron.vy;
        }
    }
    gw.em = EmState::from_array(&g[EM..]);
    (g, gw)
}

/// Conserved-variable part of [`reflect`].
pub fn reflect_state(u: &State, dir: Direction) -> State {
    let mut g = *u;
    let a = dir.axis();
    for sp in Species::BOTH {
        g[sp.offset() + 1 + a] = -g[sp.offset() + 1 + a];
    }
    let flips = match dir {
        Direction::X => [em::BX, em::EY, em::EZ],
        Direction::Y => [em::BY, em::EX, em::EZ],
    };
    for c in flips {
        g[EM + c] = -g[EM + c];
    }
    g
}

/// Ghost cell average used by the slope limiter.
pub fn ghost_average(u: &State, kind: BoundaryKind, dir: Direction) -> State {
    match kind {
        BoundaryKind::ConductingWall => reflect_state(u, dir),
        _ => *u,
    }
}
