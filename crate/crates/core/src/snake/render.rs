use super::GameState;

pub const GLYPH_HEAD: char = '@';
pub const GLYPH_BODY: char = 'o';
pub const GLYPH_SEED: char = 'S';
pub const GLYPH_DRUG: char = 'D';
pub const GLYPH_EMPTY: char = '.';

/// Row-major text view, one glyph per cell, rows separated by `\n`.
pub fn render_ascii(state: &GameState) -> String {
    let n = state.n();
    let mut grid = vec![GLYPH_EMPTY; n * n];
    grid[state.seed_pos().index(n)] = GLYPH_SEED;
    grid[state.drug_pos().index(n)] = GLYPH_DRUG;
    for (i, c) in state.body().enumerate() {
        grid[c.index(n)] = if i == 0 { GLYPH_HEAD } else { GLYPH_BODY };
    }
    let mut out = String::with_capacity(n * (n + 1));
    for (y, row) in grid.chunks(n).enumerate() {
        if y > 0 {
            out.push('\n');
        }
        out.extend(row);
    }
    out
}
