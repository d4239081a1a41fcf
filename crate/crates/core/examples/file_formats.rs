//! Round trip through the CSV, JSON and binary field formats read by the plotting scripts.

use nls_trains::io::{read_field, read_norm_csv, write_field, write_norm_csv, NormRow, RunReport};
use nls_trains::{Field, Grid, C64};

fn main() -> nls_trains::Result<()> {
    let dir = std::env::temp_dir().join("nls-trains-formats");
    std::fs::create_dir_all(&dir)?;

    let rows: Vec<NormRow> = (0..5).map(|k| NormRow::new(0.5 * k as f64, "eta_L2", 2.0, None, (-(k as f64)).exp())).collect();
    write_norm_csv(std::fs::File::create(dir.join("norms.csv"))?, &rows)?;
    print!("{}", std::fs::read_to_string(dir.join("norms.csv"))?);
    assert_eq!(read_norm_csv(std::fs::File::open(dir.join("norms.csv"))?)?, rows);

    let grid = Grid::new(vec![16, 8], vec![4.0, 2.0])?;
    let u = Field::from_fn(&grid, 1.25, |x| C64::new(x[0], x[1]));
    write_field(std::fs::File::create(dir.join("u.nlsf"))?, &u)?;
    let back = read_field(std::fs::File::open(dir.join("u.nlsf"))?)?;
    println!("field {:?} at t={} restored exactly: {}", back.grid.n, back.t, back.data == u.data);

    let mut rep = RunReport::new("example", 0, serde_json::json!({ "note": "demo" }));
    rep.results = serde_json::json!({ "rows": rows.len() });
    rep.write(&dir.join("report.json"))?;
    println!("report subcommand {}", RunReport::read(&dir.join("report.json"))?.subcommand);
    Ok(())
}
