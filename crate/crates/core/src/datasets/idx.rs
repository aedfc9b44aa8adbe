use super::LabeledDataset;
use crate::error::{Error, Result};

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

fn read_u32(bytes: &[u8], offset: usize) -> Result<u32> {
    let b = bytes
        .get(offset..offset + 4)
        .ok_or(Error::IdxTruncated { needed: offset + 4, available: bytes.len() })?;
    Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
}

fn expect_magic(bytes: &[u8], expected: u32) -> Result<()> {
    let found = read_u32(bytes, 0)?;
    if found != expected {
        return Err(Error::IdxBadMagic { expected, found });
    }
    Ok(())
}

/// Parses an IDX image file and label file into a dataset of
/// `[1, rows, cols]` images with pixels scaled to `[0, 1]`.
pub fn load_idx(images: &[u8], labels: &[u8]) -> Result<LabeledDataset> {
    load_idx_prefix(images, labels, usize::MAX)
}

/// Like [`load_idx`] but keeps at most the first `limit` examples.
pub fn load_idx_prefix(images: &[u8], labels: &[u8], limit: usize) -> Result<LabeledDataset> {
    expect_magic(images, IDX_IMAGES_MAGIC)?;
    expect_magic(labels, IDX_LABELS_MAGIC)?;
    let n_images = read_u32(images, 4)? as usize;
    let rows = read_u32(images, 8)? as usize;
    let cols = read_u32(images, 12)? as usize;
    let n_labels = read_u32(labels, 4)? as usize;
    if n_images != n_labels {
        return Err(Error::IdxCountMismatch { images: n_images, labels: n_labels });
    }
    let pixels = rows * cols;
    let needed = 16 + n_images * pixels;
    if images.len() < needed {
        return Err(Error::IdxTruncated { needed, available: images.len() });
    }
    if labels.len() < 8 + n_labels {
        return Err(Error::IdxTruncated { needed: 8 + n_labels, available: labels.len() });
    }
    let keep = n_images.min(limit);
    let features = images[16..16 + keep * pixels].iter().map(|&b| f64::from(b) / 255.0).collect();
    let labels: Vec<usize> = labels[8..8 + keep].iter().map(|&b| usize::from(b)).collect();
    let classes = labels.iter().max().map_or(10, |&m| (m + 1).max(10));
    LabeledDataset::new(features, labels, vec![1, rows.max(1), cols.max(1)], classes)
}

/// Serializes a dataset of `[1, rows, cols]` (or `[rows, cols]`) images in
/// `[0, 1]` back into IDX image and label bytes.
pub fn encode_idx(data: &LabeledDataset) -> Result<(Vec<u8>, Vec<u8>)> {
    let (rows, cols) = match *data.feature_shape() {
        [1, r, c] | [r, c] => (r, c),
        ref other => {
            return Err(Error::InvalidParameter(format!("cannot encode feature shape {other:?} as IDX")))
        }
    };
    let mut images = Vec::with_capacity(16 + data.len() * rows * cols);
    for v in [IDX_IMAGES_MAGIC, data.len() as u32, rows as u32, cols as u32] {
        images.extend_from_slice(&v.to_be_bytes());
    }
    let mut labels = Vec::with_capacity(8 + data.len());
    for v in [IDX_LABELS_MAGIC, data.len() as u32] {
        labels.extend_from_slice(&v.to_be_bytes());
    }
    for (p, l) in data.iter() {
        images.extend(p.iter().map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8));
        labels.push(u8::try_from(l).map_err(|_| Error::InvalidParameter(format!("label {l} exceeds a byte")))?);
    }
    Ok((images, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn header(magic: u32, fields: &[u32]) -> Vec<u8> {
        std::iter::once(magic).chain(fields.iter().copied()).flat_map(u32::to_be_bytes).collect()
    }

    #[test]
    fn empty_file_is_empty_dataset() {
        let d = load_idx(&header(IDX_IMAGES_MAGIC, &[0, 28, 28]), &header(IDX_LABELS_MAGIC, &[0])).unwrap();
        assert!(d.is_empty());
        assert_eq!(d.feature_shape(), &[1, 28, 28]);
    }

    #[test]
    fn distinct_rejections() {
        let img = header(IDX_IMAGES_MAGIC, &[2, 1, 1]);
        let lab = header(IDX_LABELS_MAGIC, &[3, 0, 0, 0]);
        let err = load_idx(&img, &lab).unwrap_err();
        assert!(matches!(err, Error::IdxCountMismatch { images: 2, labels: 3 }));
        assert!(err.to_string().contains('2') && err.to_string().contains('3'));

        let lab = header(IDX_LABELS_MAGIC, &[2]);
        assert!(matches!(load_idx(&img, &lab), Err(Error::IdxTruncated { .. })));
        assert!(matches!(load_idx(&lab, &lab), Err(Error::IdxBadMagic { found: 0x801, .. })));
        assert!(matches!(load_idx(&[0, 0], &lab), Err(Error::IdxTruncated { .. })));
    }

    #[test]
    fn pixels_scaled() {
        let mut img = header(IDX_IMAGES_MAGIC, &[1, 1, 2]);
        img.extend([0, 255]);
        let mut lab = header(IDX_LABELS_MAGIC, &[1]);
        lab.push(7);
        let d = load_idx(&img, &lab).unwrap();
        assert_eq!(d.point(0), &[0.0, 1.0]);
        assert_eq!(d.label(0), 7);
    }

    proptest! {
        #[test]
        fn roundtrip(pixels in proptest::collection::vec(any::<u8>(), 0..60), rows in 1usize..4) {
            let cols = 5;
            let count = pixels.len() / (rows * cols);
            let feats: Vec<f64> = pixels[..count * rows * cols].iter().map(|&b| f64::from(b) / 255.0).collect();
            let labels: Vec<usize> = (0..count).map(|i| i % 10).collect();
            let d = LabeledDataset::new(feats, labels, vec![1, rows, cols], 10).unwrap();
            let (ib, lb) = encode_idx(&d).unwrap();
            let back = load_idx(&ib, &lb).unwrap();
            prop_assert_eq!(back, d);
        }
    }
}
