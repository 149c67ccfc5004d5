//! Payload and amplitude-sequence files.
//!
//! Payloads are cut into blocks of `ceil(k / 8)` bytes, bits MSB first with
//! zero padding at the end of each block. In `raw` files the blocks are
//! concatenated. In `text` files the first line holds `k` and every further
//! line holds one block in hex. Sequence files hold one block per line as
//! comma-separated amplitudes.

use std::fmt::Write as _;

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PayloadFormat {
    Raw,
    Text,
}

pub fn block_bytes(k_bits: u64) -> usize {
    k_bits.div_ceil(8) as usize
}

/// Splits a payload file into blocks.
pub fn read_payload(data: &[u8], format: PayloadFormat, k_bits: u64) -> Result<Vec<Vec<u8>>, String> {
    let size = block_bytes(k_bits);
    match format {
        PayloadFormat::Raw => {
            if size == 0 {
                return if data.is_empty() {
                    Ok(vec![Vec::new()])
                } else {
                    Err("a 0-bit payload file must be empty".into())
                };
            }
            if data.is_empty() || !data.len().is_multiple_of(size) {
                return Err(format!(
                    "payload of {} bytes is not a whole number of {size}-byte blocks",
                    data.len()
                ));
            }
            Ok(data.chunks(size).map(<[u8]>::to_vec).collect())
        }
        PayloadFormat::Text => {
            let text = std::str::from_utf8(data).map_err(|_| "text payload is not UTF-8".to_string())?;
            let mut lines = text.lines();
            let header = lines.next().ok_or("text payload has no bit-count line")?;
            let declared: u64 = header
                .trim()
                .parse()
                .map_err(|_| format!("bad bit-count line {header:?}"))?;
            if declared != k_bits {
                return Err(format!("payload declares {declared} bits, the matcher carries {k_bits}"));
            }
            let blocks: Vec<&str> = lines.map(str::trim).filter(|l| !l.is_empty()).collect();
            if size == 0 {
                return Ok(vec![Vec::new()]);
            }
            if blocks.is_empty() {
                return Err("text payload has no blocks".into());
            }
            blocks
                .iter()
                .enumerate()
                .map(|(i, line)| {
                    let bytes = hex::decode(line).map_err(|e| format!("block {}: {e}", i + 1))?;
                    if bytes.len() != size {
                        return Err(format!("block {} has {} bytes, expected {size}", i + 1, bytes.len()));
                    }
                    Ok(bytes)
                })
                .collect()
        }
    }
}

pub fn write_payload(blocks: &[Vec<u8>], format: PayloadFormat, k_bits: u64) -> Vec<u8> {
    match format {
        PayloadFormat::Raw => blocks.concat(),
        PayloadFormat::Text => {
            let mut out = format!("{k_bits}\n");
            for b in blocks {
                out.push_str(&hex::encode(b));
                out.push('\n');
            }
            out.into_bytes()
        }
    }
}

pub fn read_sequences(text: &str) -> Result<Vec<Vec<u32>>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            line.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|_| format!("line {}: bad amplitude {:?}", i + 1, t.trim()))
                })
                .collect()
        })
        .collect()
}

pub fn write_sequences(seqs: &[Vec<u32>]) -> String {
    let mut out = String::new();
    for s in seqs {
        for (i, a) in s.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{a}").unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_blocks() {
        let data: Vec<u8> = (0..12).collect();
        let blocks = read_payload(&data, PayloadFormat::Raw, 48).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(write_payload(&blocks, PayloadFormat::Raw, 48), data);
        assert!(read_payload(&data[..7], PayloadFormat::Raw, 48).is_err());
        assert!(read_payload(&[], PayloadFormat::Raw, 48).is_err());
        assert_eq!(read_payload(&[], PayloadFormat::Raw, 0).unwrap(), vec![Vec::<u8>::new()]);
    }

    #[test]
    fn text_blocks() {
        let blocks = vec![vec![0xab, 0xc0], vec![0x01, 0x80]];
        let text = write_payload(&blocks, PayloadFormat::Text, 10);
        assert_eq!(text, b"10\nabc0\n0180\n");
        assert_eq!(read_payload(&text, PayloadFormat::Text, 10).unwrap(), blocks);
        assert!(read_payload(&text, PayloadFormat::Text, 11).is_err());
        assert!(read_payload(b"10\nabc\n", PayloadFormat::Text, 10).is_err());
        assert!(read_payload(b"", PayloadFormat::Text, 10).is_err());
    }

    #[test]
    fn sequences() {
        let seqs = vec![vec![1, 3, 5], vec![7, 1, 1]];
        let text = write_sequences(&seqs);
        assert_eq!(text, "1,3,5\n7,1,1\n");
        assert_eq!(read_sequences(&text).unwrap(), seqs);
        assert_eq!(read_sequences("1, 3\n\n5,7\n").unwrap(), vec![vec![1, 3], vec![5, 7]]);
        assert!(read_sequences("1,x\n").is_err());
    }
}
