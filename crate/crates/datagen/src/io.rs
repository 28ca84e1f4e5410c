use std::io::Write;

use relres_core::OfferBook;

pub const CSV_HEADER: [&str; 5] = ["id", "volume_mw", "reliability", "price_per_mw", "source"];

/// Writes `book` as CSV under [`CSV_HEADER`].
pub fn write_offers_csv<W: Write>(book: &OfferBook, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if book.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    for o in book.iter() {
        w.serialize(o)?;
    }
    w.flush()?;
    Ok(())
}

pub fn offers_to_csv(book: &OfferBook) -> String {
    let mut buf = Vec::new();
    write_offers_csv(book, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}
