//! CSV tables and the gnuplot scripts that plot them.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::CliError;

/// Writes a header, rows and trailing `# key=value` comment lines.
pub fn write_csv<R, I>(path: &Path, header: &[&str], rows: I, footer: &[String]) -> Result<(), CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let file = File::create(path).map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let io = |e: csv::Error| CliError::Io(format!("writing {}: {e}", path.display()));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    let mut inner = w
        .into_inner()
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    for line in footer {
        writeln!(inner, "# {line}").map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    }
    inner.flush().map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

/// `data.csv` → `data.gp`.
pub fn script_path(csv: &Path) -> PathBuf {
    csv.with_extension("gp")
}

#[derive(Debug, Clone, Copy)]
pub enum Plot {
    /// Trajectories with the given number of paths.
    Paths(usize),
    ErrorLadder,
    Cost,
    Seminorm,
}

pub fn write_gnuplot(csv: &Path, plot: Plot) -> Result<PathBuf, CliError> {
    let data = csv.file_name().map_or_else(|| csv.display().to_string(), |n| n.to_string_lossy().into_owned());
    let stem = csv.file_stem().map_or_else(|| "plot".into(), |n| n.to_string_lossy().into_owned());
    let body = match plot {
        Plot::Paths(n) => format!(
            "set xlabel 't'\nset ylabel 'x'\nunset key\n\
             plot for [i=0:{last}] '{data}' using ($1==i ? $2 : 1/0):($1==i ? $3 : 1/0) with lines\n",
            last = n.saturating_sub(1)
        ),
        Plot::ErrorLadder => format!(
            "set logscale xy 2\nset xlabel 'delta'\nset ylabel 'RMSE at T'\n\
             plot '{data}' using 1:2:3 with yerrorlines title 'RMSE'\n"
        ),
        Plot::Cost => format!(
            "set logscale xy 2\nset xlabel 'delta'\nset ylabel 'mean steps'\n\
             plot '{data}' using 1:2:3 with yerrorlines title 'E[N]'\n"
        ),
        Plot::Seminorm => format!(
            "set xlabel 'kappa'\nset ylabel 'seminorm'\nset y2label 'predicted order'\nset y2tics\n\
             plot '{data}' using 1:2 with linespoints title 'seminorm', \
             '' using 1:3 axes x1y2 with linespoints title 'predicted order'\n"
        ),
    };
    let script = format!(
        "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n\
         set terminal pngcairo size 800,600\nset output '{stem}.png'\n{body}"
    );
    let path = script_path(csv);
    std::fs::write(&path, script).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Shortest round-trip formatting, so identical values give identical bytes.
pub fn num(x: f64) -> String {
    format!("{x}")
}
