use std::path::PathBuf;

use gravimech::harness::{emit, grid, read_table, sweep, sweep_table, ExperimentConfig, Format, SweepAxis, SWEEP_COLUMNS};

fn config() -> ExperimentConfig {
    ExperimentConfig::load(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/silica.toml")).unwrap()
}

fn sweep_bytes(threads: usize, format: Format) -> Vec<u8> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let c = config();
    let values = grid(1e-3, 1e-1, 1000, true).unwrap();
    let results = pool.install(|| sweep(&c, SweepAxis::OmegaSn, &values)).unwrap();
    let mut buf = vec![];
    emit(&sweep_table(&results), format, &serde_json::json!({"axis": "omega_sn"}), &mut buf).unwrap();
    buf
}

#[test]
fn thousand_row_sweep_is_byte_stable_and_lossless() {
    for format in [Format::Csv, Format::Json] {
        let one = sweep_bytes(1, format);
        let many = sweep_bytes(4, format);
        assert_eq!(one, many, "{format:?} output depends on worker count");
        let table = read_table(format, one.as_slice()).unwrap();
        assert_eq!(table.rows.len(), 1000);
        assert_eq!(table.columns, SWEEP_COLUMNS);
        let mut again = vec![];
        emit(&table, format, &serde_json::json!({"axis": "omega_sn"}), &mut again).unwrap();
        assert_eq!(again, one, "{format:?} re-emission differs");
    }
}

#[test]
fn sweep_rows_follow_grid_order() {
    let values = grid(0.1, 1.0, 7, false).unwrap();
    let results = sweep(&config(), SweepAxis::Twait, &values).unwrap();
    let table = sweep_table(&results);
    for (row, v) in table.rows.iter().zip(&values) {
        assert_eq!(row[0], *v);
        assert_eq!(row[6], *v, "T_wait column");
    }
}
