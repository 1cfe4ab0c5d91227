use super::{Action, Mark, PlayerId, Step, TerminalReason};

pub const ROWS: usize = 6;
pub const COLS: usize = 7;

/// Row 0 is the top of the board; pieces fall to the lowest empty row.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ConnectFour {
    cells: [[Option<Mark>; COLS]; ROWS],
}

impl ConnectFour {
    pub fn cell(&self, row: usize, col: usize) -> Option<Mark> {
        self.cells[row][col]
    }

    pub(crate) fn legal_actions(&self, player: PlayerId) -> Vec<Action> {
        let mark = Mark::for_player(player);
        (0..COLS).filter(|&c| self.cells[0][c].is_none()).map(|c| Action::Drop { mark, col: c as u8 }).collect()
    }

    fn landing_row(&self, col: usize) -> Option<usize> {
        (0..ROWS).rev().find(|&r| self.cells[r][col].is_none())
    }

    fn connects_four(&self, row: usize, col: usize) -> bool {
        let Some(mark) = self.cells[row][col] else {
            return false;
        };
        let count = |dr: isize, dc: isize| {
            let mut n = 0;
            let (mut r, mut c) = (row as isize + dr, col as isize + dc);
            while (0..ROWS as isize).contains(&r)
                && (0..COLS as isize).contains(&c)
                && self.cells[r as usize][c as usize] == Some(mark)
            {
                n += 1;
                r += dr;
                c += dc;
            }
            n
        };
        [(0, 1), (1, 0), (1, 1), (1, -1)].iter().any(|&(dr, dc)| 1 + count(dr, dc) + count(-dr, -dc) >= 4)
    }

    pub(crate) fn apply(&mut self, player: PlayerId, action: &Action) -> Step {
        let Action::Drop { col, .. } = *action else { unreachable!("legality checked by caller") };
        let col = col as usize;
        let row = self.landing_row(col).expect("legal column has room");
        self.cells[row][col] = Some(Mark::for_player(player));
        if self.connects_four(row, col) {
            let mut rewards = [-1.0; 2];
            rewards[player] = 1.0;
            Step::end(rewards, TerminalReason::Win)
        } else if (0..COLS).all(|c| self.cells[0][c].is_some()) {
            Step::end([0.0; 2], TerminalReason::Draw)
        } else {
            Step::default()
        }
    }

    pub fn render(&self) -> String {
        self.cells
            .iter()
            .map(|row| row.iter().map(|c| c.map_or('_', Mark::symbol)).collect::<String>())
            .collect::<Vec<_>>()
            .join("\n")
    }
}
