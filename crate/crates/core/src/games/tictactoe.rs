use super::{Action, Mark, PlayerId, Step, TerminalReason};

pub const LINES: [[usize; 3]; 8] =
    [[0, 1, 2], [3, 4, 5], [6, 7, 8], [0, 3, 6], [1, 4, 7], [2, 5, 8], [0, 4, 8], [2, 4, 6]];

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TicTacToe {
    cells: [Option<Mark>; 9],
}

impl TicTacToe {
    pub fn cell(&self, row: usize, col: usize) -> Option<Mark> {
        self.cells[row * 3 + col]
    }

    pub fn winner(&self) -> Option<Mark> {
        LINES.iter().find_map(|l| {
            let m = self.cells[l[0]]?;
            (self.cells[l[1]] == Some(m) && self.cells[l[2]] == Some(m)).then_some(m)
        })
    }

    pub fn is_full(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    pub(crate) fn legal_actions(&self, player: PlayerId) -> Vec<Action> {
        let mark = Mark::for_player(player);
        (0..9)
            .filter(|&i| self.cells[i].is_none())
            .map(|i| Action::Place { mark, row: (i / 3) as u8, col: (i % 3) as u8 })
            .collect()
    }

    pub(crate) fn apply(&mut self, player: PlayerId, action: &Action) -> Step {
        let Action::Place { row, col, .. } = *action else { unreachable!("legality checked by caller") };
        self.cells[row as usize * 3 + col as usize] = Some(Mark::for_player(player));
        if self.winner().is_some() {
            let mut rewards = [-1.0; 2];
            rewards[player] = 1.0;
            Step::end(rewards, TerminalReason::Win)
        } else if self.is_full() {
            Step::end([0.0; 2], TerminalReason::Draw)
        } else {
            Step::default()
        }
    }

    /// Three-line grid with `_` for empty cells.
    pub fn render(&self) -> String {
        (0..3)
            .map(|r| (0..3).map(|c| self.cell(r, c).map_or('_', Mark::symbol)).collect::<String>())
            .collect::<Vec<_>>()
            .join("\n")
    }
}
